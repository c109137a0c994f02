#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace edtr {

/// k embeddings of dimension D stored row-major. Always k >= 2 with finite entries.
class PointCloud {
public:
    PointCloud(std::size_t k, std::size_t dim, std::vector<double> values);
    static PointCloud from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const { return k_; }
    std::size_t dim() const { return dim_; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
    std::span<const double> values() const { return values_; }

    PointCloud scaled(double factor) const;
    /// Rows reordered so that new row i is old row order[i].
    PointCloud permuted(std::span<const std::size_t> order) const;

private:
    std::size_t k_;
    std::size_t dim_;
    std::vector<double> values_;
};

/// Index into a condensed upper-triangle array for the pair i < j.
constexpr std::size_t condensed_index(std::size_t k, std::size_t i, std::size_t j) {
    return i * k - i * (i + 1) / 2 + (j - i - 1);
}

struct DistanceSummary {
    std::size_t k = 0;
    std::vector<double> pairwise;  // d_ij for i < j, condensed
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::vector<double> centroid;
    std::vector<double> radii;  // ||e_i - centroid||

    double distance(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return i < j ? pairwise[condensed_index(k, i, j)] : pairwise[condensed_index(k, j, i)];
    }
};

DistanceSummary distance_summary(const PointCloud& cloud);

/// k x k row-major cosine similarities. Throws ZeroNormRow for a zero vector.
std::vector<double> cosine_matrix(const PointCloud& cloud);

inline constexpr int kNoise = -1;

struct ClusterAssignment {
    std::vector<int> labels;  // kNoise marks noise
    std::size_t n_clusters = 0;
    std::size_t n_noise = 0;

    static ClusterAssignment from_labels(std::vector<int> labels);
};

/// Closed eps-balls counting the point itself; clusters numbered in order of
/// their first core point.
ClusterAssignment dbscan(const DistanceSummary& summary, double eps, std::size_t min_samples);
ClusterAssignment dbscan(const PointCloud& cloud, double eps, std::size_t min_samples);

struct KMeansOptions {
    std::uint64_t seed = 0;
    std::size_t max_iter = 300;
    std::size_t n_init = 10;  // k-means++ restarts, lowest inertia wins
    // Small clouds also start from every n-subset of points when there are at
    // most this many subsets.
    std::size_t max_subset_starts = 64;
};

struct KMeansResult {
    ClusterAssignment assignment;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;
    std::vector<double> inertia_history;  // of the winning restart, one entry per Lloyd step
};

KMeansResult kmeans(const PointCloud& cloud, std::size_t n_clusters, const KMeansOptions& options);

inline KMeansResult kmeans(const PointCloud& cloud, std::size_t n_clusters, std::uint64_t seed,
                           std::size_t max_iter = 300) {
    return kmeans(cloud, n_clusters, KMeansOptions{seed, max_iter, 10, 64});
}

/// Mean silhouette coefficient. Singleton clusters and a == b == 0 score 0.
double silhouette(const DistanceSummary& summary, const ClusterAssignment& assignment);
double silhouette(const PointCloud& cloud, const ClusterAssignment& assignment);

}  // namespace edtr
