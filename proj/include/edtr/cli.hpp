#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "edtr/dirichlet.hpp"
#include "edtr/fusion.hpp"
#include "edtr/split.hpp"

namespace edtr::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kDataError = 3,
    kParameterError = 4,
    kFitPrecondition = 5,
};

struct RunConfig {
    std::optional<std::filesystem::path> config_file;
    std::optional<std::filesystem::path> dataset;
    std::optional<std::filesystem::path> weights;
    std::optional<std::filesystem::path> head;
    std::optional<std::filesystem::path> fusion;
    std::optional<std::filesystem::path> scores;
    std::optional<std::filesystem::path> spec;
    std::optional<std::filesystem::path> report;
    std::filesystem::path out = ".";  // not part of the manifest: outputs are recorded by file name
    std::uint64_t seed = 0;
    SplitSpec split;
    std::string subset = "all";
    bool strict = false;
    bool diagnostics = false;
    std::optional<FusionMode> fusion_mode;
    bool raw_eq3 = false;
    std::optional<std::string> embed_endpoint;
    std::size_t jobs = 1;
    std::size_t bins = 10;
    std::string composite = "mean4";
    std::size_t max_components = kDefaultMaxComponents;
    HeadTrainingSpec head_training;
    CombinerSpec combiner;

    nlohmann::json to_json() const;
};

/// Flattened key-value file: top-level keys as-is, section keys as "section.key".
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

/// Applies recognised keys onto `config`; unknown keys are an InvalidConfig error
/// unless they belong to a section consumed elsewhere (topo.weights).
void apply_key_values(RunConfig& config, const std::map<std::string, std::string>& values);

int cmd_score(const RunConfig& config);
int cmd_fit(const RunConfig& config);
int cmd_evaluate(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_report(const RunConfig& config);

/// Full command-line entry point: `edtr <score|fit|evaluate|simulate|report> [flags]`.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace edtr::cli
