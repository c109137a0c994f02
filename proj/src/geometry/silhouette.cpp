#include <algorithm>
#include <limits>
#include <map>

#include "edtr/error.hpp"
#include "edtr/geometry.hpp"

namespace edtr {

double silhouette(const DistanceSummary& summary, const ClusterAssignment& assignment) {
    const std::size_t k = summary.k;
    if (assignment.labels.size() != k) throw Error(Errc::DimensionMismatch, "label count differs from point count");
    if (assignment.n_noise != 0) throw Error(Errc::InvalidArgument, "silhouette is undefined for noise labels");

    std::map<int, std::size_t> sizes;
    for (int l : assignment.labels) ++sizes[l];
    if (sizes.size() < 2) throw Error(Errc::InsufficientClusters, "silhouette needs at least 2 clusters");

    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const int own = assignment.labels[i];
        if (sizes[own] == 1) continue;
        std::map<int, double> sums;
        for (std::size_t j = 0; j < k; ++j) {
            if (j != i) sums[assignment.labels[j]] += summary.distance(i, j);
        }
        const double a = sums[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [label, sum] : sums) {
            if (label != own) b = std::min(b, sum / static_cast<double>(sizes[label]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(k);
}

double silhouette(const PointCloud& cloud, const ClusterAssignment& assignment) {
    return silhouette(distance_summary(cloud), assignment);
}

}  // namespace edtr
