#include <algorithm>
#include <cmath>

#include "edtr/error.hpp"
#include "edtr/numeric.hpp"
#include "edtr/topo.hpp"

namespace edtr {

double reasoning_spread(const DistanceSummary& summary) { return summary.stddev; }

double consistency_score(std::span<const double> cosines, std::size_t k) {
    if (cosines.size() != k * k || k < 2) throw Error(Errc::DimensionMismatch, "cosine matrix must be k x k");
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) sum += cosines[i * k + j];
    }
    return 1.0 - 2.0 * sum / static_cast<double>(k * (k - 1));
}

double complexity_entropy(const DistanceSummary& summary) {
    if (summary.mean < kDegenerateEps) return 0.0;
    return summary.stddev / summary.mean;
}

double stability_score(const DistanceSummary& summary) {
    const auto clusters = dbscan(summary, kDbscanEps, kDbscanMinSamples);
    return static_cast<double>(clusters.n_noise) / static_cast<double>(summary.k) +
           1.0 / (static_cast<double>(clusters.n_clusters) + 1.0);
}

double coherence_score(const DistanceSummary& summary) {
    const double m = mean(summary.radii);
    if (m < kDegenerateEps) return 0.0;
    return population_stddev(summary.radii) / m;
}

double diversity_penalty(const DistanceSummary& summary) { return std::max(0.0, 0.5 * (summary.mean - 1.0)); }

double outlier_risk(const DistanceSummary& summary) {
    const double q1 = linear_quantile(summary.radii, 0.25);
    const double q3 = linear_quantile(summary.radii, 0.75);
    const double fence = q3 + 1.5 * (q3 - q1);
    // Radii of symmetric configurations differ in the last bits; require a
    // margin above the fence before counting an outlier.
    const double margin = kDegenerateEps * std::max(1.0, std::abs(fence));
    std::size_t outliers = 0;
    for (double r : summary.radii) {
        if (r - fence > margin) ++outliers;
    }
    return static_cast<double>(outliers) / static_cast<double>(summary.radii.size());
}

double cluster_quality(const PointCloud& cloud, const DistanceSummary& summary, std::uint64_t seed) {
    if (*std::max_element(summary.radii.begin(), summary.radii.end()) < kDegenerateEps) return 0.0;
    const std::size_t upper = std::min(cloud.size(), kMaxSilhouetteClusters);
    double best = -1.0;
    for (std::size_t n = 2; n <= upper; ++n) {
        const auto result = kmeans(cloud, n, KMeansOptions{seed});
        best = std::max(best, silhouette(summary, result.assignment));
    }
    return 1.0 - best;
}

double cluster_quality(const PointCloud& cloud, std::uint64_t seed) {
    return cluster_quality(cloud, distance_summary(cloud), seed);
}

std::array<double, kTopoFeatureCount> TopoProfile::raw() const {
    return {spread, consistency, complexity, stability, coherence, diversity, outlier, cluster_quality};
}

std::array<double, kTopoFeatureCount> TopoProfile::clamped_features() const {
    auto f = raw();
    for (auto& v : f) v = std::clamp(v, 0.0, 1.0);
    return f;
}

double aggregate_risk(const std::array<double, kTopoFeatureCount>& features, const FeatureWeights& weights,
                      std::array<bool, kTopoFeatureCount>* clamped) {
    double risk = 0.0;
    for (std::size_t i = 0; i < kTopoFeatureCount; ++i) {
        const double c = std::clamp(features[i], 0.0, 1.0);
        if (clamped) (*clamped)[i] = c != features[i];
        risk += weights.w[i] * c;
    }
    // Weights sum to 1 only up to rounding.
    return std::clamp(risk, 0.0, 1.0);
}

TopoProfile topo_profile(const PointCloud& cloud, const FeatureWeights& weights, std::uint64_t seed) {
    weights.validate();
    const auto summary = distance_summary(cloud);
    const auto cosines = cosine_matrix(cloud);

    TopoProfile p;
    p.spread = reasoning_spread(summary);
    p.consistency = consistency_score(cosines, cloud.size());
    p.complexity = complexity_entropy(summary);
    p.stability = stability_score(summary);
    p.coherence = coherence_score(summary);
    p.diversity = diversity_penalty(summary);
    p.outlier = outlier_risk(summary);
    p.cluster_quality = cluster_quality(cloud, summary, seed);
    p.risk = aggregate_risk(p.raw(), weights, &p.clamped);
    return p;
}

}  // namespace edtr
