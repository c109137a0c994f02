#include <algorithm>
#include <cmath>

#include "edtr/error.hpp"
#include "edtr/fusion.hpp"
#include "edtr/hash.hpp"
#include "edtr/numeric.hpp"

namespace edtr {

namespace {

// Keeps predictions inside the open unit interval after sigmoid saturation.
constexpr double kProbabilityFloor = 1e-12;

std::string training_digest(std::span<const LabeledFeatures> samples) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : samples) {
        rows.push_back({std::vector<double>(s.features.begin(), s.features.end()), s.correct});
    }
    return sha256_hex(rows.dump());
}

}  // namespace

double TrainedCombiner::predict(const FusedFeatures& features) const {
    double z = intercept;
    for (std::size_t i = 0; i < kFusedFeatureCount; ++i) {
        z += weights[i] * (features[i] - feature_mean[i]) / feature_scale[i];
    }
    return std::clamp(sigmoid(z), kProbabilityFloor, 1.0 - kProbabilityFloor);
}

TrainedCombiner fit_combiner(std::span<const LabeledFeatures> samples, const CombinerSpec& spec) {
    if (!(spec.learning_rate > 0.0) || !(spec.l2 >= 0.0)) {
        throw Error(Errc::InvalidHyper, "learning rate must be positive and l2 non-negative");
    }
    if (samples.size() < 2) throw Error(Errc::InvalidHyper, "combiner needs at least 2 samples");

    const std::size_t n = samples.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    TrainedCombiner model;
    model.spec = spec;
    model.seed = spec.seed;
    model.training_hash = training_digest(samples);

    for (std::size_t f = 0; f < kFusedFeatureCount; ++f) {
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = samples[i].features[f];
        model.feature_mean[f] = mean(column);
        const double sd = population_stddev(column);
        model.feature_scale[f] = sd > 1e-12 ? sd : 1.0;
    }

    const auto positives = static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const LabeledFeatures& s) { return s.correct; }));
    if (positives == 0 || positives == n) {
        const double rate = (static_cast<double>(positives) + 0.5) / (static_cast<double>(n) + 1.0);
        model.intercept = std::log(rate / (1.0 - rate));
        model.warning = "single_class_training";
        return model;
    }

    std::vector<FusedFeatures> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < kFusedFeatureCount; ++f) {
            x[i][f] = (samples[i].features[f] - model.feature_mean[f]) / model.feature_scale[f];
        }
    }

    for (std::size_t iter = 0; iter < spec.iterations; ++iter) {
        FusedFeatures grad{};
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = model.intercept;
            for (std::size_t f = 0; f < kFusedFeatureCount; ++f) z += model.weights[f] * x[i][f];
            const double residual = sigmoid(z) - (samples[i].correct ? 1.0 : 0.0);
            grad_b += residual;
            for (std::size_t f = 0; f < kFusedFeatureCount; ++f) grad[f] += residual * x[i][f];
        }
        model.intercept -= spec.learning_rate * grad_b * inv_n;
        for (std::size_t f = 0; f < kFusedFeatureCount; ++f) {
            model.weights[f] -= spec.learning_rate * (grad[f] * inv_n + spec.l2 * model.weights[f]);
        }
    }
    return model;
}

}  // namespace edtr
