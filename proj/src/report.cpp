#include "einbulk/report.hpp"

#include "einbulk/atlas.hpp"
#include "einbulk/embed.hpp"
#include "einbulk/errors.hpp"
#include "einbulk/expr.hpp"
#include "einbulk/geometry.hpp"
#include "einbulk/glue.hpp"
#include "einbulk/homotopy.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace einbulk {

namespace {

using json = nlohmann::ordered_json;

// verification tolerances, fixed here and echoed into every report
constexpr double kTolEinstein = 1e-8;
constexpr double kTolEmbedResidual = 1e-7;
constexpr double kTolConstraints = 1e-8;
constexpr double kTolSolve = 1e-8;
constexpr double kTolAssembled = 1e-6;

struct LoadedManifest {
    ManifoldSpec manifold;
    std::string fiber;      // empty: no product structure requested
    double lambda = 0.0;
    double epsilon = 1.0;
    int order = 4;
    GlueConfig glue;
    int grid_per_axis = 8;
    std::set<std::string> tasks;
    std::string homotopy_base, homotopy_fiber;
    int homotopy_max = 4;
};

ManifoldSpec manifold_from_json(const json& j) {
    if (j.is_string()) return catalog_manifold(j.get<std::string>());
    if (!j.is_object()) throw ManifestError("manifold must be a catalog id or an object");
    ManifoldSpec m;
    m.name = j.value("name", "custom");
    if (!j.contains("dim")) throw ManifestError("manifold object needs 'dim'");
    m.dim = j.at("dim").get<int>();
    if (m.dim < 1) throw ManifestError("manifold dim must be >= 1");
    m.periods.assign(m.dim, 0.0);
    if (j.contains("periods")) {
        auto p = j.at("periods");
        if (static_cast<int>(p.size()) != m.dim) throw ManifestError("periods size != dim");
        for (int k = 0; k < m.dim; ++k) m.periods[k] = p[k].get<double>();
    }
    if (!j.contains("charts") || j.at("charts").empty())
        throw ManifestError("manifold object needs a nonempty 'charts' list");
    for (const auto& cj : j.at("charts")) {
        ChartBox box;
        for (const auto& v : cj.at("center")) box.center.push_back(v.get<double>());
        for (const auto& v : cj.at("half")) box.half.push_back(v.get<double>());
        if (static_cast<int>(box.center.size()) != m.dim ||
            static_cast<int>(box.half.size()) != m.dim)
            throw ManifestError("chart center/half size != dim");
        for (double h : box.half)
            if (h <= 0.0) throw ManifestError("chart half-widths must be positive");
        m.charts.push_back(std::move(box));
    }
    if (!j.contains("metric")) throw ManifestError("manifold object needs 'metric' expressions");
    auto mj = j.at("metric");
    if (static_cast<int>(mj.size()) != m.dim) throw ManifestError("metric rows != dim");
    m.metric.assign(m.dim, std::vector<std::string>(m.dim));
    for (int i = 0; i < m.dim; ++i) {
        if (static_cast<int>(mj[i].size()) != m.dim) throw ManifestError("metric cols != dim");
        for (int k = 0; k < m.dim; ++k) m.metric[i][k] = mj[i][k].get<std::string>();
    }
    for (int i = 0; i < m.dim; ++i)
        for (int k = 0; k < m.dim; ++k)
            if (m.metric[i][k] != m.metric[k][i])
                throw ManifestError("metric expressions must be symmetric");
    return m;
}

LoadedManifest load_manifest(const json& j, const RunOptions& options) {
    if (!j.is_object()) throw ManifestError("manifest must be a JSON object");
    std::string version = j.value("version", "1");
    if (version != "1") throw ManifestError("unsupported manifest version '" + version + "'");

    LoadedManifest m;
    m.manifold = manifold_from_json(j.contains("manifold") ? j.at("manifold") : json("circle"));
    if (j.contains("metric")) {
        auto mj = j.at("metric");
        if (static_cast<int>(mj.size()) != m.manifold.dim)
            throw ManifestError("metric override rows != dim");
        for (int i = 0; i < m.manifold.dim; ++i)
            for (int k = 0; k < m.manifold.dim; ++k)
                m.manifold.metric[i][k] = mj[i][k].get<std::string>();
    }
    m.fiber = j.value("fiber", "");
    m.lambda = options.lambda ? *options.lambda : j.value("lambda", 0.0);
    m.epsilon = j.value("epsilon", 1.0);
    if (m.epsilon * m.epsilon != 1.0) throw ManifestError("epsilon must be +1 or -1");
    m.order = options.order ? *options.order : j.value("order", 4);
    if (m.order < 2) throw ManifestError("order must be >= 2");

    json cov = j.value("cover", json::object());
    m.glue.order = m.order;
    m.glue.lambda = m.lambda;
    m.glue.epsilon = m.epsilon;
    m.glue.seed = cov.value("seed", 2026);
    m.glue.n_override = cov.value("N", 0);
    m.glue.overlap_samples = cov.value("samples_per_overlap", 8);
    m.glue.interior_samples = cov.value("interior_samples", 8);
    m.glue.coeff_order = cov.value("coeff_order", 2);
    m.glue.fiber_band = cov.value("fiber_band", 0.15);
    m.grid_per_axis = cov.value("grid_per_axis", 8);

    // validate every metric expression up front (parse position surfaces here)
    std::vector<double> center0(m.manifold.dim, 0.0);
    for (int i = 0; i < m.manifold.dim; ++i)
        for (int k = i; k < m.manifold.dim; ++k) parse(m.manifold.metric[i][k]);

    if (!options.verb.empty() && options.verb != "verify") {
        m.tasks.insert(options.verb);
    } else if (j.contains("tasks") && options.verb.empty()) {
        for (const auto& t : j.at("tasks")) m.tasks.insert(t.get<std::string>());
        if (m.tasks.count("verify")) {
            m.tasks.erase("verify");
            m.tasks.insert("ricci");
            m.tasks.insert("embed-local");
            if (!m.fiber.empty()) m.tasks.insert("glue");
            if (j.contains("homotopy")) m.tasks.insert("homotopy");
        }
    } else {
        // verify verb or no tasks: everything applicable
        m.tasks.insert("ricci");
        m.tasks.insert("embed-local");
        if (!m.fiber.empty()) m.tasks.insert("glue");
        if (j.contains("homotopy")) m.tasks.insert("homotopy");
    }
    for (const std::string& t : m.tasks)
        if (t != "ricci" && t != "embed-local" && t != "glue" && t != "homotopy")
            throw ManifestError("unknown task '" + t + "'");
    if (m.tasks.count("glue") && m.fiber.empty())
        throw ManifestError("glue task needs a 'fiber' entry (interval or circle)");

    if (j.contains("homotopy")) {
        m.homotopy_base = j.at("homotopy").value("base", "S1");
        m.homotopy_fiber = j.at("homotopy").value("fiber", "R1");
        m.homotopy_max = j.at("homotopy").value("max_level", 4);
    } else {
        m.homotopy_base = m.manifold.name;
        m.homotopy_fiber = m.fiber.empty() ? "R1" : m.fiber;
    }
    return m;
}

json run_ricci(const LoadedManifest& m) {
    json out;
    out["lambda"] = m.lambda;
    out["tolerance"] = kTolEinstein;
    ProductBulk self;
    self.base = m.manifold;
    self.total = m.manifold;
    self.n = m.manifold.dim;
    double worst = 0.0;
    json charts = json::array();
    for (int j = 0; j < static_cast<int>(m.manifold.charts.size()); ++j) {
        SeedMetric seed = chart_seed(self, j, m.order);
        RicciField res = einstein_residual(seed.g, m.lambda);
        Jet R = scalar_curvature(seed.g, ricci(christoffel(seed.g)));
        json cj;
        cj["chart"] = j;
        cj["scalar_curvature_at_center"] = R.constant_term();
        cj["residual_by_degree"] = residual_by_degree(res, std::max(m.order - 2, 0));
        double norm = residual_norm(res, std::max(m.order - 2, 0));
        cj["residual_norm"] = norm;
        worst = std::max(worst, norm);
        charts.push_back(std::move(cj));
    }
    out["charts"] = std::move(charts);
    out["residual_norm_max"] = worst;
    out["pass"] = worst <= kTolEinstein;
    return out;
}

json run_embed(const LoadedManifest& m) {
    json out;
    out["lambda"] = m.lambda;
    out["epsilon"] = m.epsilon;
    out["order"] = m.order;
    out["tolerances"] = {{"residual", kTolEmbedResidual},
                         {"constraints", kTolConstraints},
                         {"slice", 0.0}};
    ProductBulk self;
    self.base = m.manifold;
    self.total = m.manifold;
    self.n = m.manifold.dim;
    bool pass = true;
    json charts = json::array();
    for (int j = 0; j < static_cast<int>(m.manifold.charts.size()); ++j) {
        SeedMetric seed = chart_seed(self, j, m.order);
        EmbeddingResult res = extend_metric(seed, m.lambda, m.epsilon, m.order);
        CertifyReport cert = certify(res, seed);
        json cj;
        cj["chart"] = j;
        cj["slice_max_deviation"] = cert.slice_max_deviation;
        cj["residual_by_degree"] = cert.residual_by_degree;
        cj["residual_norm"] = cert.residual_norm;
        cj["constraint_norm"] = cert.constraint_norm;
        cj["block_form_ok"] = cert.block_form_ok;
        cj["epsilon"] = res.bulk.epsilon;
        // coefficient tables of the extended base block, nonzero entries only
        json comps = json::array();
        for (int a = 0; a < seed.n; ++a)
            for (int b = a; b < seed.n; ++b) {
                const Jet& jet = res.bulk.base.g(a, b);
                json entries = json::array();
                for (int k = 0; k < jet.layout().size(); ++k) {
                    if (jet[k] == 0.0) continue;
                    json entry;
                    entry["exponents"] = jet.layout().exponents(k);
                    entry["value"] = jet[k];
                    entries.push_back(std::move(entry));
                }
                comps.push_back({{"component", "g" + std::to_string(a + 1) + std::to_string(b + 1)},
                                 {"coefficients", std::move(entries)}});
            }
        cj["bulk_coefficients"] = std::move(comps);
        bool ok = cert.slice_max_deviation == 0.0 && cert.residual_norm <= kTolEmbedResidual &&
                  cert.constraint_norm <= kTolConstraints && cert.block_form_ok;
        cj["pass"] = ok;
        pass = pass && ok;
        charts.push_back(std::move(cj));
    }
    out["charts"] = std::move(charts);
    out["pass"] = pass;
    return out;
}

void dump_matrices_csv(const OverlapSystem& sys, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t bi = 0; bi < sys.blocks.size(); ++bi) {
        const PointBlock& blk = sys.blocks[bi];
        std::ofstream f(dir + "/system_block_" + std::to_string(bi) + ".csv");
        for (int r = 0; r < blk.A.rows(); ++r) {
            for (int c = 0; c < blk.A.cols(); ++c) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", blk.A(r, c));
                f << buf << ",";
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", blk.b[r]);
            f << buf << "\n";
        }
    }
}

json run_glue(const LoadedManifest& m, const RunOptions& options) {
    json out;
    out["fiber"] = m.fiber;
    out["lambda"] = m.lambda;
    out["tolerances"] = {{"solve", kTolSolve}, {"assembled", kTolAssembled}, {"isometry", 0.0}};

    ProductBulk bulk = make_product_bulk(m.manifold, m.fiber);
    GlueConfig cfg = m.glue;
    long long M = count_equations(bulk.n);
    int N = cfg.n_override > 0 ? cfg.n_override : static_cast<int>(M) + 1;
    out["n"] = bulk.n;
    out["M"] = M;
    out["N"] = N;

    auto grid = default_sample_grid(bulk.total, m.grid_per_axis, cfg.fiber_band);
    AtlasCover cover = build_cover(bulk.total, N, grid, cfg.seed);
    json hist = json::array();
    for (int h : cover.multiplicity_histogram) hist.push_back(h);
    out["cover"] = {{"charts", json::array()},
                    {"multiplicity_histogram", hist},
                    {"multiplicity_bound", bulk.total.dim + 1}};
    for (int j = 0; j < static_cast<int>(bulk.total.charts.size()); ++j)
        out["cover"]["charts"].push_back({{"id", "Q" + std::to_string(j)},
                                          {"center", bulk.total.charts[j].center},
                                          {"half", bulk.total.charts[j].half},
                                          {"ball_radius", cover.classes[j].radius}});

    // bell positivity sweep
    std::vector<std::vector<double>> sweep;
    for (int i = 0; i < 1000; ++i) {
        auto u = halton_point(10000 + i, bulk.total.dim);
        std::vector<double> p(bulk.total.dim);
        for (int k = 0; k < bulk.total.dim; ++k) {
            if (bulk.total.periods[k] > 0.0) {
                p[k] = u[k] * bulk.total.periods[k];
            } else {
                const ChartBox& box = bulk.total.charts[0];
                p[k] = box.center[k] + (2.0 * u[k] - 1.0) * cfg.fiber_band * box.half[k];
            }
        }
        sweep.push_back(std::move(p));
    }
    PositivityReport pos = positivity_check(cover, cover_bell_family(cover), sweep);
    out["bell_positivity"] = {{"min_sum", pos.min_sum}, {"pass", pos.pass}};

    TargetSet targets = target_components(bulk, cover, cfg);
    auto samples = glue_sample_points(bulk, cover, cfg);
    OverlapSystem sys = build_system(bulk, cover, targets, samples, cfg);
    out["system"] = {{"rows", sys.total_rows()},
                     {"unknowns", sys.total_unknowns()},
                     {"sample_points", samples.size()}};

    PsiSolution psis = solve_psi(sys, cover, cfg);
    out["system"]["rank"] = psis.rank;
    out["solve_residual"] = psis.residual;

    GlobalMetricSpec spec{bulk, cover, targets, sys, psis, cfg};
    double assembled_max = 0.0;
    double isometry_dev = 0.0;
    int checked = 0;
    for (int s = 0; s < static_cast<int>(sys.blocks.size()); ++s) {
        const PointBlock& blk = sys.blocks[s];
        if (blk.charts.size() < 2) continue;
        for (int chart : blk.charts) {
            ChartMetric ge = assemble_metric(spec, s, chart);
            RicciField res = einstein_residual(ge, cfg.lambda);
            assembled_max = std::max(assembled_max, residual_norm(res, 0));
            ChartMetric restricted = restrict_to_base(spec, s, chart);
            ChartMetric direct = base_metric_in_chart(bulk, chart, blk.point, cfg.coeff_order);
            for (int i = 0; i < bulk.n; ++i)
                for (int j = i; j < bulk.n; ++j)
                    isometry_dev = std::max(
                        isometry_dev, max_abs_coeff(jet_sub(restricted.g(i, j), direct.g(i, j))));
            ++checked;
        }
    }
    out["assembled_residual_max"] = assembled_max;
    out["isometry_max_deviation"] = isometry_dev;
    out["overlap_points_checked"] = checked;

    if (options.dump_matrices && !options.out_dir.empty())
        dump_matrices_csv(sys, options.out_dir + "/matrices");

    bool pass = psis.residual <= kTolSolve && assembled_max <= kTolAssembled &&
                isometry_dev == 0.0 && pos.pass;
    out["pass"] = pass;
    return out;
}

json run_homotopy(const LoadedManifest& m) {
    json out;
    out["base"] = m.homotopy_base;
    out["fiber"] = m.homotopy_fiber;
    json table = json::array();
    bool pass = true;
    for (int level = 1; level <= m.homotopy_max; ++level) {
        GroupExpr split = split_product(m.homotopy_base, m.homotopy_fiber, level);
        GroupExpr direct = homotopy_group(m.homotopy_base + "x" + m.homotopy_fiber, level);
        bool ok = group_equal(split, direct);
        pass = pass && ok;
        table.push_back({{"m", level},
                         {"pi_m_base", to_string(normalize(homotopy_group(m.homotopy_base, level)))},
                         {"pi_m_fiber", to_string(normalize(homotopy_group(m.homotopy_fiber, level)))},
                         {"pi_m_bulk", to_string(split)},
                         {"consistent", ok}});
    }
    out["table"] = std::move(table);
    out["pass"] = pass;
    return out;
}

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

} // namespace

RunResult run_manifest(const nlohmann::ordered_json& manifest, const RunOptions& options) {
    RunResult result;
    result.report["report_version"] = "1";
    result.report["timestamp"] = iso_timestamp();
    result.report["manifest"] = manifest;

    LoadedManifest loaded;
    try {
        loaded = load_manifest(manifest, options);
    } catch (const Error& e) {
        result.report["error"] = {{"code", e.code()}, {"what", e.what()}};
        result.exit_code = 2;
        return result;
    } catch (const nlohmann::json::exception& e) {
        result.report["error"] = {{"code", "ManifestError"}, {"what", e.what()}};
        result.exit_code = 2;
        return result;
    }

    bool pass = true;
    json tasks;
    try {
        if (loaded.tasks.count("ricci")) {
            tasks["ricci"] = run_ricci(loaded);
            pass = pass && tasks["ricci"]["pass"].get<bool>();
        }
        if (loaded.tasks.count("embed-local")) {
            tasks["embed_local"] = run_embed(loaded);
            pass = pass && tasks["embed_local"]["pass"].get<bool>();
        }
        if (loaded.tasks.count("glue")) {
            tasks["glue"] = run_glue(loaded, options);
            pass = pass && tasks["glue"]["pass"].get<bool>();
        }
        if (loaded.tasks.count("homotopy")) {
            tasks["homotopy"] = run_homotopy(loaded);
            pass = pass && tasks["homotopy"]["pass"].get<bool>();
        }
    } catch (const Error& e) {
        result.report["tasks"] = std::move(tasks);
        result.report["error"] = {{"code", e.code()}, {"what", e.what()}};
        result.exit_code = 1;
        return result;
    }

    result.report["tasks"] = std::move(tasks);
    result.report["pass"] = pass;
    result.exit_code = pass ? 0 : 1;

    if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir);
        std::ofstream f(options.out_dir + "/report.json");
        f << result.report.dump(2) << "\n";
    }
    return result;
}

RunResult run_manifest_file(const std::string& manifest_path, const RunOptions& options) {
    std::ifstream f(manifest_path);
    if (!f) {
        RunResult r;
        r.report["error"] = {{"code", "ManifestError"},
                             {"what", "cannot read manifest '" + manifest_path + "'"}};
        r.exit_code = 2;
        return r;
    }
    nlohmann::ordered_json manifest;
    try {
        manifest = nlohmann::ordered_json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        RunResult r;
        r.report["error"] = {{"code", "ManifestError"}, {"what", e.what()}};
        r.exit_code = 2;
        return r;
    }
    return run_manifest(manifest, options);
}

} // namespace einbulk
