#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>

#include "edtr/cli.hpp"
#include "edtr/error.hpp"

namespace edtr::cli {

namespace {

bool parse_bool(const std::string& key, std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw Error(Errc::InvalidConfig, key + " must be a boolean, got " + v);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        T out{};
        if constexpr (std::is_same_v<T, double>) {
            out = std::stod(v, &used);
        } else {
            if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
            out = static_cast<T>(std::stoull(v, &used));
        }
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw Error(Errc::InvalidConfig, key + " is not a valid number: " + v);
    }
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
    auto opt_path = [](const std::optional<std::filesystem::path>& p) {
        return p ? nlohmann::json(p->generic_string()) : nlohmann::json(nullptr);
    };
    return {
        {"config_file", opt_path(config_file)},
        {"dataset", opt_path(dataset)},
        {"weights", opt_path(weights)},
        {"head", opt_path(head)},
        {"fusion", opt_path(fusion)},
        {"scores", opt_path(scores)},
        {"spec", opt_path(spec)},
        {"report", opt_path(report)},
        {"seed", seed},
        {"split", split.to_string()},
        {"subset", subset},
        {"strict", strict},
        {"diagnostics", diagnostics},
        {"fusion_mode", fusion_mode ? nlohmann::json(to_string(*fusion_mode)) : nlohmann::json(nullptr)},
        {"raw_eq3", raw_eq3},
        {"embed_endpoint", embed_endpoint ? nlohmann::json(*embed_endpoint) : nlohmann::json(nullptr)},
        {"bins", bins},
        {"composite", composite},
        {"max_components", max_components},
        {"head_training",
         {{"epochs", head_training.epochs},
          {"learning_rate", head_training.learning_rate},
          {"batch_size", head_training.batch_size}}},
        {"combiner",
         {{"iterations", combiner.iterations}, {"learning_rate", combiner.learning_rate}, {"l2", combiner.l2}}},
    };
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ptree_error& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    std::map<std::string, std::string> out;
    for (const auto& [key, node] : tree) {
        if (node.empty()) {
            out[key] = node.data();
        } else {
            for (const auto& [sub, leaf] : node) out[key + "." + sub] = leaf.data();
        }
    }
    return out;
}

void apply_key_values(RunConfig& c, const std::map<std::string, std::string>& values) {
    for (const auto& [raw_key, v] : values) {
        std::string key = raw_key;
        std::replace(key.begin(), key.end(), '-', '_');
        if (key.starts_with("topo.weights.")) continue;
        if (key == "dataset") c.dataset = v;
        else if (key == "weights") c.weights = v;
        else if (key == "head") c.head = v;
        else if (key == "fusion") c.fusion = v;
        else if (key == "scores") c.scores = v;
        else if (key == "spec") c.spec = v;
        else if (key == "report") c.report = v;
        else if (key == "out") c.out = v;
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "split") c.split = SplitSpec::parse(v);
        else if (key == "subset") c.subset = v;
        else if (key == "strict") c.strict = parse_bool(key, v);
        else if (key == "diagnostics") c.diagnostics = parse_bool(key, v);
        else if (key == "fusion_mode") c.fusion_mode = fusion_mode_from_string(v);
        else if (key == "raw_eq3") c.raw_eq3 = parse_bool(key, v);
        else if (key == "embed_endpoint") c.embed_endpoint = v;
        else if (key == "jobs") c.jobs = parse_number<std::size_t>(key, v);
        else if (key == "bins") c.bins = parse_number<std::size_t>(key, v);
        else if (key == "composite") c.composite = v;
        else if (key == "max_components") c.max_components = parse_number<std::size_t>(key, v);
        else if (key == "epochs") c.head_training.epochs = parse_number<std::size_t>(key, v);
        else if (key == "learning_rate") c.head_training.learning_rate = parse_number<double>(key, v);
        else if (key == "batch_size") c.head_training.batch_size = parse_number<std::size_t>(key, v);
        else if (key == "combiner_iterations") c.combiner.iterations = parse_number<std::size_t>(key, v);
        else if (key == "combiner_learning_rate") c.combiner.learning_rate = parse_number<double>(key, v);
        else if (key == "combiner_l2") c.combiner.l2 = parse_number<double>(key, v);
        else throw Error(Errc::InvalidConfig, "unknown config key " + raw_key);
    }
}

}  // namespace edtr::cli
