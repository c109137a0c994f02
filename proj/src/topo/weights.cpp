#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <string>

#include "edtr/error.hpp"
#include "edtr/topo.hpp"

namespace edtr {

void FeatureWeights::validate() const {
    double sum = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::InvalidConfig, "feature weights must be non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(Errc::InvalidConfig, "feature weights sum to " + std::to_string(sum) + ", expected 1");
    }
}

FeatureWeights FeatureWeights::from_config_file(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ptree_error& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    FeatureWeights weights;
    // Section names contain '.', so address children directly rather than by path.
    const auto section = tree.find("topo.weights");
    if (section != tree.not_found()) {
        for (std::size_t i = 0; i < kTopoFeatureCount; ++i) {
            const auto key = "w" + std::to_string(i + 1);
            const auto it = section->second.find(key);
            if (it == section->second.not_found()) continue;
            try {
                weights.w[i] = std::stod(it->second.data());
            } catch (const std::exception&) {
                throw Error(Errc::InvalidConfig, "topo.weights." + key + " is not a number");
            }
        }
    }
    weights.validate();
    return weights;
}

}  // namespace edtr
