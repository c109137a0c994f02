#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>

#include "edtr/geometry.hpp"

namespace edtr {

inline constexpr std::size_t kTopoFeatureCount = 8;

/// Feature names in aggregation order.
inline constexpr std::array<std::string_view, kTopoFeatureCount> kTopoFeatureNames = {
    "spread", "consistency", "complexity", "stability", "coherence", "diversity", "outlier", "cluster_quality",
};

/// Non-negative weights summing to 1; defaults are the published values.
struct FeatureWeights {
    std::array<double, kTopoFeatureCount> w = {0.20, 0.25, 0.10, 0.20, 0.10, 0.05, 0.05, 0.05};

    void validate() const;
    /// Reads keys w1..w8 from the [topo.weights] section of a key-value file.
    /// Missing keys keep their defaults.
    static FeatureWeights from_config_file(const std::filesystem::path& path);
};

inline constexpr double kDbscanEps = 0.5;
inline constexpr std::size_t kDbscanMinSamples = 2;
inline constexpr std::size_t kMaxSilhouetteClusters = 5;

struct TopoProfile {
    double spread = 0.0;           // std of pairwise distances
    double consistency = 0.0;      // 1 - mean pairwise cosine
    double complexity = 0.0;       // std / mean of pairwise distances
    double stability = 0.0;        // DBSCAN noise fraction + 1 / (clusters + 1)
    double coherence = 0.0;        // std / mean of centroid radii
    double diversity = 0.0;        // max(0, (mean distance - 1) / 2)
    double outlier = 0.0;          // fraction of radii above the Tukey fence
    double cluster_quality = 0.0;  // 1 - best KMeans silhouette
    double risk = 0.0;
    std::array<bool, kTopoFeatureCount> clamped{};

    std::array<double, kTopoFeatureCount> raw() const;
    /// Each feature clamped to [0, 1], as entered into the weighted risk.
    std::array<double, kTopoFeatureCount> clamped_features() const;
};

double reasoning_spread(const DistanceSummary& summary);
double consistency_score(std::span<const double> cosines, std::size_t k);
double complexity_entropy(const DistanceSummary& summary);
double stability_score(const DistanceSummary& summary);
double coherence_score(const DistanceSummary& summary);
double diversity_penalty(const DistanceSummary& summary);
double outlier_risk(const DistanceSummary& summary);
double cluster_quality(const PointCloud& cloud, const DistanceSummary& summary, std::uint64_t seed);
double cluster_quality(const PointCloud& cloud, std::uint64_t seed);

/// Weighted sum of the clamped features.
double aggregate_risk(const std::array<double, kTopoFeatureCount>& features, const FeatureWeights& weights,
                      std::array<bool, kTopoFeatureCount>* clamped = nullptr);

TopoProfile topo_profile(const PointCloud& cloud, const FeatureWeights& weights, std::uint64_t seed);

}  // namespace edtr
