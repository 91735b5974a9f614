#pragma once

#include <json.hpp>

#include <optional>
#include <string>

namespace einbulk {

/// Command-line overrides applied on top of the manifest.
struct RunOptions {
    std::string verb;            // "", "ricci", "embed-local", "glue", "homotopy", "verify"
    std::optional<int> order;
    std::optional<double> lambda;
    std::string out_dir;         // empty: no files written
    bool dump_matrices = false;
};

struct RunResult {
    nlohmann::ordered_json report;
    int exit_code = 0; // 0 pass, 1 computation/verdict failure, 2 manifest error
};

/// Load a manifest file, run the selected tasks, write the report (when
/// out_dir set) and return it with the exit status.
RunResult run_manifest_file(const std::string& manifest_path, const RunOptions& options = {});
RunResult run_manifest(const nlohmann::ordered_json& manifest, const RunOptions& options = {});

} // namespace einbulk
