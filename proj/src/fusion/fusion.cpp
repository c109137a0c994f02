#include <cmath>

#include "edtr/error.hpp"
#include "edtr/fusion.hpp"
#include "edtr/numeric.hpp"

namespace edtr {

const std::array<std::string_view, kFusedFeatureCount> kFusedFeatureNames = {
    "spread",      "consistency", "complexity",    "stability",    "coherence",          "diversity", "outlier",
    "cluster_quality", "concentration", "diff_entropy", "expected_max", "top_class_variance", "conf_dir",
};

std::string_view to_string(FusionMode mode) { return mode == FusionMode::Fixed ? "fixed" : "trained"; }

FusionMode fusion_mode_from_string(std::string_view name) {
    if (name == "fixed") return FusionMode::Fixed;
    if (name == "trained") return FusionMode::Trained;
    throw Error(Errc::InvalidConfig, "fusion mode must be fixed or trained, got " + std::string(name));
}

void FixedFusion::validate() const {
    if (!(w_topo >= 0.0) || !(w_dir >= 0.0) || std::abs(w_topo + w_dir - 1.0) > 1e-9) {
        throw Error(Errc::InvalidConfig, "fixed fusion weights must be non-negative and sum to 1");
    }
    if (!std::isfinite(scale) || !std::isfinite(bias)) throw Error(Errc::InvalidConfig, "non-finite fusion scale/bias");
}

double fuse_fixed(double risk_topo, double conf_dir, const FixedFusion& params) {
    const double blend = params.w_topo * (1.0 - risk_topo) + params.w_dir * conf_dir;
    return sigmoid(params.scale * blend + params.bias);
}

FusedFeatures fused_features(const TopoProfile& topo, const DirichletProfile& dirichlet) {
    FusedFeatures f{};
    const auto t = topo.clamped_features();
    std::copy(t.begin(), t.end(), f.begin());
    const auto d = dirichlet.features.as_array();
    std::copy(d.begin(), d.end(), f.begin() + kTopoFeatureCount);
    f[kFusedFeatureCount - 1] = dirichlet.conf_dir;
    return f;
}

namespace {

nlohmann::json array_json(const FusedFeatures& f) { return std::vector<double>(f.begin(), f.end()); }

FusedFeatures array_from_json(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != kFusedFeatureCount) {
        throw Error(Errc::IncompatibleParameters, "expected " + std::to_string(kFusedFeatureCount) + " coefficients");
    }
    FusedFeatures f{};
    std::copy(v.begin(), v.end(), f.begin());
    return f;
}

}  // namespace

nlohmann::json fusion_to_json(const FusionParameters& params) {
    nlohmann::json j = {
        {"version", kFusionFormatVersion},
        {"mode", to_string(params.mode)},
        {"fixed",
         {{"w_topo", params.fixed.w_topo},
          {"w_dir", params.fixed.w_dir},
          {"scale", params.fixed.scale},
          {"bias", params.fixed.bias}}},
        {"trained", nullptr},
    };
    if (params.trained) {
        const auto& t = *params.trained;
        j["trained"] = {
            {"feature_names", std::vector<std::string>(kFusedFeatureNames.begin(), kFusedFeatureNames.end())},
            {"weights", array_json(t.weights)},
            {"intercept", t.intercept},
            {"feature_mean", array_json(t.feature_mean)},
            {"feature_scale", array_json(t.feature_scale)},
            {"warning", t.warning ? nlohmann::json(*t.warning) : nlohmann::json(nullptr)},
            {"provenance",
             {{"training_sha256", t.training_hash},
              {"seed", t.seed},
              {"iterations", t.spec.iterations},
              {"learning_rate", t.spec.learning_rate},
              {"l2", t.spec.l2}}},
        };
    }
    return j;
}

FusionParameters fusion_from_json(const nlohmann::json& j) {
    try {
        if (!j.contains("version") || j.at("version").get<int>() != kFusionFormatVersion) {
            throw Error(Errc::IncompatibleParameters, "missing or unsupported fusion format version");
        }
        FusionParameters p;
        p.mode = fusion_mode_from_string(j.at("mode").get<std::string>());
        if (const auto it = j.find("fixed"); it != j.end() && it->is_object()) {
            p.fixed.w_topo = it->value("w_topo", p.fixed.w_topo);
            p.fixed.w_dir = it->value("w_dir", p.fixed.w_dir);
            p.fixed.scale = it->value("scale", p.fixed.scale);
            p.fixed.bias = it->value("bias", p.fixed.bias);
        }
        p.fixed.validate();
        if (const auto it = j.find("trained"); it != j.end() && it->is_object()) {
            TrainedCombiner t;
            t.weights = array_from_json(it->at("weights"));
            t.intercept = it->at("intercept").get<double>();
            t.feature_mean = array_from_json(it->at("feature_mean"));
            t.feature_scale = array_from_json(it->at("feature_scale"));
            if (const auto w = it->find("warning"); w != it->end() && !w->is_null()) t.warning = w->get<std::string>();
            if (const auto prov = it->find("provenance"); prov != it->end()) {
                t.training_hash = prov->value("training_sha256", std::string{});
                t.seed = prov->value("seed", std::uint64_t{0});
                t.spec.iterations = prov->value("iterations", t.spec.iterations);
                t.spec.learning_rate = prov->value("learning_rate", t.spec.learning_rate);
                t.spec.l2 = prov->value("l2", t.spec.l2);
                t.spec.seed = t.seed;
            }
            p.trained = std::move(t);
        }
        if (p.mode == FusionMode::Trained && !p.trained) {
            throw Error(Errc::IncompatibleParameters, "trained fusion mode without trained coefficients");
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::IncompatibleParameters, std::string("malformed fusion file: ") + e.what());
    }
}

}  // namespace edtr
