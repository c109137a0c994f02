#include <algorithm>
#include <limits>
#include <random>

#include "edtr/error.hpp"
#include "edtr/geometry.hpp"
#include "edtr/simd/kernels.hpp"

namespace edtr {
namespace {

using Centroids = std::vector<std::vector<double>>;

Centroids kmeans_plus_plus(const PointCloud& cloud, std::size_t n_clusters, std::mt19937_64& rng) {
    const std::size_t k = cloud.size();
    Centroids centers;
    std::vector<bool> chosen(k, false);
    std::uniform_int_distribution<std::size_t> pick_first(0, k - 1);
    std::size_t first = pick_first(rng);
    chosen[first] = true;
    centers.emplace_back(cloud.row(first).begin(), cloud.row(first).end());

    std::vector<double> d2(k, std::numeric_limits<double>::infinity());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (centers.size() < n_clusters) {
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            d2[i] = std::min(d2[i], simd::squared_distance(cloud.row(i), centers.back()));
            total += d2[i];
        }
        std::size_t next = k;
        if (total > 0.0) {
            const double target = unit(rng) * total;
            double running = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                running += d2[i];
                if (d2[i] > 0.0 && running >= target) {
                    next = i;
                    break;
                }
            }
            if (next == k) {
                // rounding left target beyond the running sum; take the last positive weight
                for (std::size_t i = k; i-- > 0;) {
                    if (d2[i] > 0.0) {
                        next = i;
                        break;
                    }
                }
            }
        } else {
            next = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
        }
        chosen[next] = true;
        centers.emplace_back(cloud.row(next).begin(), cloud.row(next).end());
    }
    return centers;
}

void assign(const PointCloud& cloud, const Centroids& centers, std::vector<int>& labels) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            const double d = simd::squared_distance(cloud.row(i), centers[c]);
            if (d < best) {
                best = d;
                best_c = static_cast<int>(c);
            }
        }
        labels[i] = best_c;
    }
}

// Empty clusters take the point farthest from its current centroid, drawn from
// clusters that can spare one.
void reseed_empty(const PointCloud& cloud, Centroids& centers, std::vector<int>& labels) {
    const std::size_t n = centers.size();
    std::vector<std::size_t> sizes(n, 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < n; ++c) {
        if (sizes[c] != 0) continue;
        std::size_t far = cloud.size();
        double far_d = -1.0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const auto owner = static_cast<std::size_t>(labels[i]);
            if (sizes[owner] < 2) continue;
            const double d = simd::squared_distance(cloud.row(i), centers[owner]);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        --sizes[static_cast<std::size_t>(labels[far])];
        labels[far] = static_cast<int>(c);
        sizes[c] = 1;
        centers[c].assign(cloud.row(far).begin(), cloud.row(far).end());
    }
}

void update_centroids(const PointCloud& cloud, const std::vector<int>& labels, Centroids& centers) {
    std::vector<std::size_t> sizes(centers.size(), 0);
    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        simd::axpy(1.0, cloud.row(i), centers[c]);
        ++sizes[c];
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (auto& v : centers[c]) v /= static_cast<double>(sizes[c]);
    }
}

double inertia_of(const PointCloud& cloud, const std::vector<int>& labels, const Centroids& centers) {
    double total = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        total += simd::squared_distance(cloud.row(i), centers[static_cast<std::size_t>(labels[i])]);
    }
    return total;
}

// Single-point transfers that lower inertia, applied after Lloyd settles.
// Moving x from A to B changes inertia by |B|/(|B|+1)*|x-cB|^2 - |A|/(|A|-1)*|x-cA|^2.
bool transfer_pass(const PointCloud& cloud, std::vector<int>& labels, Centroids& centers) {
    std::vector<std::size_t> sizes(centers.size(), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    bool moved = false;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto from = static_cast<std::size_t>(labels[i]);
        if (sizes[from] < 2) continue;
        const double na = static_cast<double>(sizes[from]);
        const double removal = na / (na - 1.0) * simd::squared_distance(cloud.row(i), centers[from]);
        double best_delta = 0.0;
        std::size_t to = from;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (c == from) continue;
            const double nb = static_cast<double>(sizes[c]);
            const double delta = nb / (nb + 1.0) * simd::squared_distance(cloud.row(i), centers[c]) - removal;
            if (delta < best_delta - 1e-12 * removal) {
                best_delta = delta;
                to = c;
            }
        }
        if (to == from) continue;
        labels[i] = static_cast<int>(to);
        --sizes[from];
        ++sizes[to];
        update_centroids(cloud, labels, centers);
        moved = true;
    }
    return moved;
}

// Every n-subset of points as starting centroids, in lexicographic order; empty
// when there are more than `limit` subsets.
std::vector<Centroids> subset_starts(const PointCloud& cloud, std::size_t n_clusters, std::size_t limit) {
    const std::size_t k = cloud.size();
    double count = 1.0;
    for (std::size_t i = 0; i < n_clusters; ++i) {
        count = count * static_cast<double>(k - i) / static_cast<double>(i + 1);
    }
    std::vector<Centroids> starts;
    if (count > static_cast<double>(limit)) return starts;
    std::vector<std::size_t> pick(n_clusters);
    for (std::size_t i = 0; i < n_clusters; ++i) pick[i] = i;
    while (true) {
        Centroids centers;
        for (std::size_t p : pick) centers.emplace_back(cloud.row(p).begin(), cloud.row(p).end());
        starts.push_back(std::move(centers));
        std::size_t i = n_clusters;
        while (i-- > 0 && pick[i] == k - n_clusters + i) {
        }
        if (i == static_cast<std::size_t>(-1)) break;
        ++pick[i];
        for (std::size_t j = i + 1; j < n_clusters; ++j) pick[j] = pick[j - 1] + 1;
    }
    return starts;
}

}  // namespace

KMeansResult kmeans(const PointCloud& cloud, std::size_t n_clusters, const KMeansOptions& options) {
    const std::size_t k = cloud.size();
    if (n_clusters < 2 || n_clusters > k) {
        throw Error(Errc::InvalidArgument, "kmeans needs 2 <= n_clusters <= k");
    }
    if (options.n_init == 0) throw Error(Errc::InvalidArgument, "kmeans needs at least one initialization");
    bool coincident = true;
    for (std::size_t i = 1; i < k && coincident; ++i) {
        coincident = std::equal(cloud.row(i).begin(), cloud.row(i).end(), cloud.row(0).begin());
    }
    if (coincident) throw Error(Errc::DegenerateCloud, "all points coincide");

    std::mt19937_64 rng(options.seed);
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    std::vector<Centroids> starts = subset_starts(cloud, n_clusters, options.max_subset_starts);
    const std::size_t runs = options.n_init + starts.size();
    for (std::size_t run = 0; run < runs; ++run) {
        Centroids centers =
            run < options.n_init ? kmeans_plus_plus(cloud, n_clusters, rng) : std::move(starts[run - options.n_init]);
        std::vector<int> labels(k, -1);
        std::vector<int> previous;
        std::vector<double> history;
        for (std::size_t iter = 0; iter < std::max<std::size_t>(options.max_iter, 1); ++iter) {
            assign(cloud, centers, labels);
            reseed_empty(cloud, centers, labels);
            update_centroids(cloud, labels, centers);
            history.push_back(inertia_of(cloud, labels, centers));
            if (labels == previous) break;
            previous = labels;
        }
        while (transfer_pass(cloud, labels, centers)) {
            history.push_back(inertia_of(cloud, labels, centers));
        }
        if (history.back() < best.inertia) {
            best.inertia = history.back();
            best.inertia_history = std::move(history);
            best.centroids = std::move(centers);
            best.assignment = ClusterAssignment::from_labels(std::move(labels));
        }
    }
    return best;
}

}  // namespace edtr
