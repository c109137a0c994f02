#include <algorithm>
#include <deque>
#include <set>

#include "edtr/error.hpp"
#include "edtr/geometry.hpp"

namespace edtr {

ClusterAssignment ClusterAssignment::from_labels(std::vector<int> labels) {
    ClusterAssignment a;
    std::set<int> distinct;
    for (int l : labels) {
        if (l == kNoise) {
            ++a.n_noise;
        } else if (l >= 0) {
            distinct.insert(l);
        } else {
            throw Error(Errc::InvalidArgument, "cluster labels must be >= -1");
        }
    }
    a.n_clusters = distinct.size();
    a.labels = std::move(labels);
    return a;
}

ClusterAssignment dbscan(const DistanceSummary& summary, double eps, std::size_t min_samples) {
    if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "dbscan eps must be positive");
    if (min_samples < 1) throw Error(Errc::InvalidArgument, "dbscan min_samples must be at least 1");
    const std::size_t k = summary.k;

    std::vector<std::vector<std::size_t>> neighbors(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (summary.distance(i, j) <= eps) neighbors[i].push_back(j);
        }
    }
    std::vector<bool> core(k);
    for (std::size_t i = 0; i < k; ++i) core[i] = neighbors[i].size() >= min_samples;

    constexpr int kUnvisited = -2;
    std::vector<int> labels(k, kUnvisited);
    int next = 0;
    for (std::size_t seed = 0; seed < k; ++seed) {
        if (!core[seed] || labels[seed] != kUnvisited) continue;
        const int cluster = next++;
        std::deque<std::size_t> frontier{seed};
        labels[seed] = cluster;
        while (!frontier.empty()) {
            const std::size_t p = frontier.front();
            frontier.pop_front();
            if (!core[p]) continue;
            for (std::size_t q : neighbors[p]) {
                if (labels[q] == kUnvisited) {
                    labels[q] = cluster;
                    frontier.push_back(q);
                }
            }
        }
    }
    std::replace(labels.begin(), labels.end(), kUnvisited, kNoise);
    return ClusterAssignment::from_labels(std::move(labels));
}

ClusterAssignment dbscan(const PointCloud& cloud, double eps, std::size_t min_samples) {
    return dbscan(distance_summary(cloud), eps, min_samples);
}

}  // namespace edtr
