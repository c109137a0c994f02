#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "edtr/atomic_file.hpp"
#include "edtr/cli.hpp"
#include "edtr/error.hpp"
#include "edtr/hash.hpp"
#include "edtr/metrics.hpp"

namespace edtr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Precondition failures specific to `fit`.
struct FitPrecondition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::InvalidConfig:
        case Errc::InvalidSpec:
        case Errc::InvalidHyper:
        case Errc::InvalidArgument:
            return kConfigError;
        case Errc::IncompatibleParameters:
        case Errc::InconsistentN:
        case Errc::NonPositiveAlpha:
            return kParameterError;
        default:
            return kDataError;
    }
}

void require_file(const std::optional<fs::path>& path, std::string_view what) {
    if (!path) throw Error(Errc::InvalidConfig, "--" + std::string(what) + " is required");
    if (!fs::is_regular_file(*path)) {
        throw Error(Errc::InvalidConfig, std::string(what) + " file not found: " + path->string());
    }
}

void check_optional_file(const std::optional<fs::path>& path, std::string_view what) {
    if (path) require_file(path, what);
}

std::string to_jsonl(const std::vector<json>& rows) {
    std::string out;
    for (const auto& row : rows) {
        out += row.dump();
        out += '\n';
    }
    return out;
}

json parse_json_file(const fs::path& path, Errc on_error) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(on_error, path.string() + ": " + e.what());
    }
}

/// Files and hashes for the run manifest. Outputs are keyed by file name so
/// the manifest does not depend on the output directory.
class Manifest {
public:
    Manifest(std::string command, const RunConfig& config) : command_(std::move(command)), config_(config.to_json()) {}

    void input(std::string_view role, const fs::path& path) {
        inputs_[std::string(role)] = {{"path", path.generic_string()}, {"sha256", sha256_file(path)}};
    }
    void output(const std::string& name, std::string_view contents) { outputs_[name] = sha256_hex(contents); }
    void warn(std::string message) { warnings_.push_back(std::move(message)); }
    void note(const std::string& key, json value) { extra_[key] = std::move(value); }

    json to_json() const {
        json j = {
            {"command", command_},
            {"config", config_},
            {"config_sha256", sha256_hex(config_.dump())},
            {"seed", config_.at("seed")},
            {"inputs", inputs_},
            {"outputs", outputs_},
            {"warnings", warnings_},
        };
        for (const auto& [k, v] : extra_.items()) j[k] = v;
        return j;
    }

private:
    std::string command_;
    json config_;
    json inputs_ = json::object();
    json outputs_ = json::object();
    json warnings_ = json::array();
    json extra_ = json::object();
};

/// Writes each (name, contents) pair atomically into `dir`, then the manifest.
void write_outputs(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files,
                   Manifest& manifest) {
    for (const auto& [name, contents] : files) manifest.output(name, contents);
    for (const auto& [name, contents] : files) write_file_atomic(dir / name, contents);
    write_file_atomic(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
}

FeatureWeights resolve_weights(const RunConfig& c) {
    if (c.weights) return FeatureWeights::from_config_file(*c.weights);
    if (c.config_file) return FeatureWeights::from_config_file(*c.config_file);
    return {};
}

std::optional<std::string> resolve_endpoint(const RunConfig& c) {
    auto endpoint = c.embed_endpoint;
    if (!endpoint) {
        if (const char* env = std::getenv("EDTR_EMBED_ENDPOINT"); env && *env) endpoint = env;
    }
    if (endpoint && (endpoint->starts_with("http://") || endpoint->starts_with("https://"))) {
        endpoint = "http:" + *endpoint;
    }
    return endpoint;
}

Dataset load_input_dataset(const RunConfig& c, Manifest& manifest) {
    require_file(c.dataset, "dataset");
    manifest.input("dataset", *c.dataset);
    const auto endpoint = resolve_endpoint(c);
    LoadOptions options;
    options.strict = c.strict;
    options.allow_missing_embeddings = endpoint.has_value();
    auto loaded = load_dataset(*c.dataset, options);
    if (loaded.dropped_count > 0) {
        manifest.note("dropped_lines", loaded.dropped_count);
        for (const auto& issue : loaded.issues) {
            std::cerr << "edtr: warning: dropped line " << issue.line_no << ": " << issue.message << "\n";
        }
    }
    if (endpoint) {
        auto source = make_embedding_source(*endpoint);
        const auto filled = fill_missing_embeddings(loaded.dataset, *source);
        manifest.note("embedded_trajectories", filled);
    }
    return std::move(loaded.dataset);
}

ScoreOptions score_options(const RunConfig& c, std::span<const ReasoningSample> samples) {
    ScoreOptions options;
    options.weights = resolve_weights(c);
    options.seed = c.seed;
    options.diagnostics = c.diagnostics;
    options.entropy_form = c.raw_eq3 ? EntropyConfidenceForm::Raw : EntropyConfidenceForm::SignCorrected;
    options.imputation = TokenStatImputation::from_samples(samples);
    return options;
}

std::vector<Partition> partitions_for(const RunConfig& c, std::span<const ReasoningSample> samples) {
    return assign_partitions(samples, c.split, c.seed);
}

}  // namespace

int cmd_score(const RunConfig& c) {
    check_optional_file(c.weights, "weights");
    check_optional_file(c.head, "head");
    check_optional_file(c.fusion, "fusion");
    Manifest manifest("score", c);
    if (c.weights) manifest.input("weights", *c.weights);
    if (c.config_file) manifest.input("config", *c.config_file);

    HeadParameters head;
    FusionParameters fusion;
    if (c.head) {
        manifest.input("head", *c.head);
        head = head_from_json(parse_json_file(*c.head, Errc::IncompatibleParameters));
    }
    if (c.fusion) {
        manifest.input("fusion", *c.fusion);
        fusion = fusion_from_json(parse_json_file(*c.fusion, Errc::IncompatibleParameters));
    }
    if (c.fusion_mode) fusion.mode = *c.fusion_mode;
    if (fusion.mode == FusionMode::Trained && !fusion.trained) {
        throw Error(Errc::IncompatibleParameters, "trained fusion mode needs a fusion file with combiner coefficients");
    }

    const Dataset dataset = load_input_dataset(c, manifest);
    if (!c.head) {
        head = HeadParameters::zeros(dataset.samples.front().k(), c.max_components);
        manifest.warn("no head parameters given; scoring with an all-zero head");
    }
    const auto options = score_options(c, dataset.samples);
    const auto reports = score_samples(dataset.samples, head, fusion, options, std::max<std::size_t>(c.jobs, 1));

    std::vector<json> rows;
    rows.reserve(reports.size());
    for (const auto& r : reports) rows.push_back(report_to_json(r));
    manifest.note("n_samples", reports.size());
    write_outputs(c.out, {{"scores.jsonl", to_jsonl(rows)}}, manifest);
    std::cout << "scored " << reports.size() << " samples -> " << (c.out / "scores.jsonl").string() << "\n";
    return kOk;
}

int cmd_fit(const RunConfig& c) {
    check_optional_file(c.weights, "weights");
    Manifest manifest("fit", c);
    if (c.weights) manifest.input("weights", *c.weights);
    if (c.config_file) manifest.input("config", *c.config_file);
    const Dataset dataset = load_input_dataset(c, manifest);

    for (const auto& s : dataset.samples) {
        if (!s.gold_answer || !s.correct) throw FitPrecondition("sample " + s.query_id + " has no gold answer");
    }
    const std::size_t k = dataset.samples.front().k();
    for (const auto& s : dataset.samples) {
        if (s.k() != k) {
            throw Error(Errc::IncompatibleParameters, "fit needs a constant k; sample " + s.query_id + " has k=" +
                                                          std::to_string(s.k()) + ", expected " + std::to_string(k));
        }
    }

    const auto parts = partitions_for(c, dataset.samples);
    std::vector<ReasoningSample> train, calib;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] == Partition::Train) train.push_back(dataset.samples[i]);
        if (parts[i] == Partition::Calib) calib.push_back(dataset.samples[i]);
    }
    if (train.empty()) throw FitPrecondition("train split is empty");
    if (calib.empty()) throw FitPrecondition("calibration split is empty");

    auto options = score_options(c, dataset.samples);
    std::vector<HeadExample> examples;
    examples.reserve(train.size());
    for (const auto& s : train) examples.push_back(head_example(s, options.imputation, c.max_components));

    HeadTrainingSpec head_spec = c.head_training;
    head_spec.seed = c.seed;
    const auto trained =
        train_head(HeadParameters::random(k, c.max_components, c.seed), examples, head_spec);

    FusionParameters fusion;
    const auto calib_reports = score_samples(calib, trained.params, fusion, options, 1);
    std::vector<LabeledFeatures> labeled;
    labeled.reserve(calib.size());
    for (std::size_t i = 0; i < calib.size(); ++i) {
        labeled.push_back({calib_reports[i].features, *calib[i].correct});
    }
    CombinerSpec combiner_spec = c.combiner;
    combiner_spec.seed = c.seed;
    fusion.trained = fit_combiner(labeled, combiner_spec);
    fusion.mode = FusionMode::Trained;
    if (fusion.trained->warning) {
        manifest.warn(*fusion.trained->warning);
        std::cerr << "edtr: warning: " << *fusion.trained->warning << "\n";
    }

    json head_json = head_to_json(trained.params);
    manifest.note("n_train", train.size());
    manifest.note("n_calib", calib.size());
    manifest.note("head_loss", {{"initial", trained.loss_history.front()}, {"final", trained.loss_history.back()}});
    write_outputs(c.out,
                  {{"head.json", head_json.dump(2) + "\n"}, {"fusion.json", fusion_to_json(fusion).dump(2) + "\n"}},
                  manifest);
    std::cout << "trained head on " << train.size() << " samples and combiner on " << calib.size() << " samples\n";
    return kOk;
}

int cmd_evaluate(const RunConfig& c) {
    require_file(c.scores, "scores");
    Manifest manifest("evaluate", c);
    manifest.input("scores", *c.scores);
    const Dataset dataset = load_input_dataset(c, manifest);

    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) by_id.emplace(dataset.samples[i].query_id, i);

    std::optional<Partition> subset;
    if (c.subset != "all") subset = partition_from_string(c.subset);
    const auto parts = subset ? partitions_for(c, dataset.samples) : std::vector<Partition>{};

    std::vector<ScoredPrediction> preds;
    std::vector<std::pair<std::string, std::string>> answers;
    std::vector<std::string> missing;
    std::istringstream lines(read_file(*c.scores));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json row;
        std::string id;
        double confidence = 0.0;
        try {
            row = json::parse(line);
            id = row.at("query_id").get<std::string>();
            confidence = row.at("confidence").get<double>();
        } catch (const json::exception& e) {
            throw Error(Errc::MalformedLine, "scores line " + std::to_string(line_no) + ": " + e.what());
        }
        const auto it = by_id.find(id);
        if (it == by_id.end() || !dataset.samples[it->second].correct) {
            missing.push_back(id);
            continue;
        }
        if (subset && parts[it->second] != *subset) continue;
        const auto& s = dataset.samples[it->second];
        preds.push_back({id, confidence, *s.correct});
        answers.emplace_back(s.predicted_answer, *s.gold_answer);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
        throw Error(Errc::JoinFailure, "scores without a labeled dataset sample: " + list);
    }
    if (preds.empty()) throw Error(Errc::EmptyPredictions, "no scored samples in subset " + c.subset);

    const auto report = build_report(preds, answers, c.bins, composite_formula(c.composite));
    json report_json = calibration_report_to_json(report);
    report_json["metadata"]["subset"] = c.subset;
    manifest.note("n_predictions", preds.size());
    write_outputs(c.out,
                  {{"report.json", report_json.dump(2) + "\n"}, {"reliability.csv", reliability_csv(report.bins)}},
                  manifest);

    std::printf("n          %zu\n", report.n);
    std::printf("accuracy   %.4f\n", report.accuracy);
    std::printf("f1         %.4f\n", report.f1);
    std::printf("ece        %.4f\n", report.ece);
    std::printf("brier      %.4f\n", report.brier);
    std::printf("composite  %.4f  (%s)\n", report.composite, report.composite_formula.c_str());
    return kOk;
}

int cmd_simulate(const RunConfig& c) {
    Manifest manifest("simulate", c);
    GeneratorSpec spec;
    if (c.spec) {
        require_file(c.spec, "spec");
        manifest.input("spec", *c.spec);
        spec = generator_spec_from_json(parse_json_file(*c.spec, Errc::InvalidSpec));
    }
    const Dataset dataset = synth_dataset(spec, c.seed);
    manifest.note("generator", generator_spec_to_json(spec));
    manifest.note("n_samples", dataset.samples.size());
    write_outputs(c.out, {{"dataset.jsonl", serialize_dataset(dataset)}}, manifest);
    std::cout << "wrote " << dataset.samples.size() << " samples -> " << (c.out / "dataset.jsonl").string() << "\n";
    return kOk;
}

int cmd_report(const RunConfig& c) {
    const fs::path path = c.report.value_or(c.out / "report.json");
    if (!fs::is_regular_file(path)) throw Error(Errc::InvalidConfig, "report file not found: " + path.string());
    const auto report = calibration_report_from_json(parse_json_file(path, Errc::MalformedLine));

    std::printf("n          %zu\n", report.n);
    std::printf("accuracy   %.4f\n", report.accuracy);
    std::printf("f1         %.4f%s\n", report.f1, report.f1_macro ? "  (macro)" : "  (exact match)");
    std::printf("ece        %.4f\n", report.ece);
    std::printf("brier      %.4f\n", report.brier);
    std::printf("composite  %.4f  (%s)\n", report.composite, report.composite_formula.c_str());
    if (!report.composite_note.empty()) std::printf("           %s\n", report.composite_note.c_str());
    std::printf("\n%8s %8s %8s %10s %10s\n", "lo", "hi", "count", "mean_conf", "accuracy");
    for (const auto& b : report.bins) {
        std::printf("%8.2f %8.2f %8zu %10.4f %10.4f\n", b.lo, b.hi, b.count, b.mean_confidence, b.empirical_accuracy);
    }

    const fs::path csv_path = path.parent_path() / "reliability.csv";
    if (fs::is_regular_file(csv_path)) {
        const auto bins = parse_reliability_csv(read_file(csv_path));
        const double from_csv = ece_from_bins(bins);
        std::printf("\nece from reliability.csv  %.12f\n", from_csv);
    }
    return kOk;
}

namespace {

struct ValueFlag {
    std::string key;
    CLI::Option* option = nullptr;
    std::shared_ptr<std::string> value;
};

struct SwitchFlag {
    std::string key;
    CLI::Option* option = nullptr;
};

struct FlagSet {
    std::vector<ValueFlag> values;
    std::vector<SwitchFlag> switches;
    std::shared_ptr<std::string> config_path = std::make_shared<std::string>();
    CLI::Option* config_option = nullptr;

    void value(CLI::App* app, const std::string& name, const std::string& help) {
        ValueFlag f{name, nullptr, std::make_shared<std::string>()};
        f.option = app->add_option("--" + name, *f.value, help);
        std::replace(f.key.begin(), f.key.end(), '-', '_');
        values.push_back(std::move(f));
    }
    void flag(CLI::App* app, const std::string& name, const std::string& help) {
        SwitchFlag f{name, app->add_flag("--" + name, help)};
        std::replace(f.key.begin(), f.key.end(), '-', '_');
        switches.push_back(std::move(f));
    }

    std::map<std::string, std::string> given() const {
        std::map<std::string, std::string> out;
        for (const auto& f : values) {
            if (f.option->count() > 0) out[f.key] = *f.value;
        }
        for (const auto& f : switches) {
            if (f.option->count() > 0) out[f.key] = "true";
        }
        return out;
    }
};

void add_common_flags(CLI::App* app, FlagSet& flags) {
    flags.config_option = app->add_option("--config", *flags.config_path, "key-value config file; flags override it");
    flags.value(app, "dataset", "JSONL dataset");
    flags.value(app, "weights", "topology weight file with a [topo.weights] section (w1..w8)");
    flags.value(app, "head", "Dirichlet head parameters (head.json)");
    flags.value(app, "fusion", "fusion parameters (fusion.json)");
    flags.value(app, "seed", "64-bit unsigned seed");
    flags.value(app, "out", "output directory");
    flags.value(app, "split", "partition spec, e.g. train:calib:test=0.6:0.2:0.2");
    flags.flag(app, "strict", "fail on the first malformed dataset line instead of dropping it");
    flags.flag(app, "diagnostics", "attach homology barcodes to each report");
    flags.value(app, "fusion-mode", "fixed | trained");
    flags.flag(app, "raw-eq3", "use the uncorrected entropy-confidence form");
    flags.value(app, "embed-endpoint", "http:<url> or file:<path> for missing embeddings (env EDTR_EMBED_ENDPOINT)");
    flags.value(app, "jobs", "scoring worker threads");
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Topology and Dirichlet confidence scoring for multi-trajectory reasoning"};
    app.require_subcommand(1, 1);

    struct Command {
        std::string name;
        std::string help;
        int (*fn)(const RunConfig&);
        CLI::App* app = nullptr;
        FlagSet flags;
    };
    std::vector<std::unique_ptr<Command>> commands;
    auto add = [&](std::string name, std::string help, int (*fn)(const RunConfig&)) -> Command& {
        auto cmd = std::make_unique<Command>();
        cmd->name = std::move(name);
        cmd->help = std::move(help);
        cmd->fn = fn;
        cmd->app = app.add_subcommand(cmd->name, cmd->help);
        add_common_flags(cmd->app, cmd->flags);
        commands.push_back(std::move(cmd));
        return *commands.back();
    };

    add("score", "score every sample; writes scores.jsonl and manifest.json", &cmd_score);
    auto& fit = add("fit", "train the Dirichlet head and the fusion combiner; writes head.json and fusion.json", &cmd_fit);
    fit.flags.value(fit.app, "max-components", "Dirichlet components (head output width)");
    fit.flags.value(fit.app, "epochs", "head training epochs");
    fit.flags.value(fit.app, "learning-rate", "head learning rate");
    fit.flags.value(fit.app, "batch-size", "head mini-batch size");
    fit.flags.value(fit.app, "combiner-iterations", "combiner gradient steps");
    fit.flags.value(fit.app, "combiner-learning-rate", "combiner step size");
    fit.flags.value(fit.app, "combiner-l2", "combiner L2 penalty");
    auto& score = *commands.front();
    score.flags.value(score.app, "max-components", "Dirichlet components when no head is given");
    auto& evaluate = add("evaluate", "join scores to labels; writes report.json and reliability.csv", &cmd_evaluate);
    evaluate.flags.value(evaluate.app, "scores", "scores.jsonl to evaluate");
    evaluate.flags.value(evaluate.app, "subset", "all | train | calib | test");
    evaluate.flags.value(evaluate.app, "bins", "reliability bins");
    evaluate.flags.value(evaluate.app, "composite", "mean4 | calibration | task");
    auto& simulate = add("simulate", "generate a synthetic dataset; writes dataset.jsonl", &cmd_simulate);
    simulate.flags.value(simulate.app, "spec", "generator spec (JSON)");
    auto& report = add("report", "print an existing report.json", &cmd_report);
    report.flags.value(report.app, "report", "report.json to render");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    for (const auto& cmd : commands) {
        if (!cmd->app->parsed()) continue;
        try {
            RunConfig config;
            if (cmd->flags.config_option->count() > 0) {
                config.config_file = *cmd->flags.config_path;
                if (!fs::is_regular_file(*config.config_file)) {
                    throw Error(Errc::InvalidConfig, "config file not found: " + config.config_file->string());
                }
                apply_key_values(config, read_key_value_file(*config.config_file));
            }
            apply_key_values(config, cmd->flags.given());
            fs::create_directories(config.out);
            return cmd->fn(config);
        } catch (const FitPrecondition& e) {
            std::cerr << "edtr: " << cmd->name << ": " << e.what() << "\n";
            return kFitPrecondition;
        } catch (const Error& e) {
            std::cerr << "edtr: " << cmd->name << ": " << e.what() << "\n";
            return exit_code_for(e.code());
        } catch (const fs::filesystem_error& e) {
            std::cerr << "edtr: " << cmd->name << ": " << e.what() << "\n";
            return kDataError;
        } catch (const std::exception& e) {
            std::cerr << "edtr: " << cmd->name << ": unexpected error: " << e.what() << "\n";
            return kFailure;
        }
    }
    return kFailure;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("edtr");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace edtr::cli
