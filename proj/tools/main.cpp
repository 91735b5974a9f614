#include "einbulk/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"einbulk: grow analytic seed metrics into certified Einstein bulks"};
    app.require_subcommand(1);

    std::string manifest;
    std::string out_dir;
    int order = 0;
    double lambda = 0.0;
    bool lambda_set = false, order_set = false, dump = false;

    const char* env_out = std::getenv("EINBULK_OUT_DIR");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--manifest", manifest, "JSON manifest path")->required();
        sub->add_option("--out", out_dir, "output directory for report.json");
        sub->add_option("--order", order, "truncation order override")
            ->each([&](const std::string&) { order_set = true; });
        sub->add_option("--lambda", lambda, "cosmological constant override")
            ->each([&](const std::string&) { lambda_set = true; });
        sub->add_flag("--dump-matrices", dump, "write overlap-system blocks as CSV");
    };

    for (const char* verb : {"ricci", "embed-local", "glue", "homotopy", "verify"})
        add_common(app.add_subcommand(verb));

    CLI11_PARSE(app, argc, argv);

    einbulk::RunOptions options;
    options.verb = app.get_subcommands().at(0)->get_name();
    options.out_dir = !out_dir.empty() ? out_dir : (env_out ? env_out : ".");
    options.dump_matrices = dump;
    if (order_set) options.order = order;
    if (lambda_set) options.lambda = lambda;

    einbulk::RunResult result = einbulk::run_manifest_file(manifest, options);

    if (result.report.contains("error")) {
        std::cerr << "error [" << result.report["error"]["code"].get<std::string>()
                  << "]: " << result.report["error"]["what"].get<std::string>() << "\n";
    }
    if (result.report.contains("tasks")) {
        for (const auto& [name, task] : result.report["tasks"].items()) {
            bool pass = task.value("pass", false);
            std::cout << (pass ? "PASS " : "FAIL ") << name << "\n";
        }
    }
    if (!options.out_dir.empty() && !result.report.contains("error"))
        std::cout << "report: " << options.out_dir << "/report.json\n";
    return result.exit_code;
}
