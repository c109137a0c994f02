#include <cmath>

#include "edtr/error.hpp"
#include "edtr/geometry.hpp"
#include "edtr/numeric.hpp"
#include "edtr/simd/kernels.hpp"

namespace edtr {

DistanceSummary distance_summary(const PointCloud& cloud) {
    const std::size_t k = cloud.size();
    const std::size_t dim = cloud.dim();
    DistanceSummary s;
    s.k = k;
    s.pairwise.reserve(k * (k - 1) / 2);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            s.pairwise.push_back(std::sqrt(simd::squared_distance(cloud.row(i), cloud.row(j))));
        }
    }
    s.mean = mean(s.pairwise);
    s.stddev = population_stddev(s.pairwise);

    s.centroid.assign(dim, 0.0);
    for (std::size_t i = 0; i < k; ++i) simd::axpy(1.0, cloud.row(i), s.centroid);
    for (auto& c : s.centroid) c /= static_cast<double>(k);

    s.radii.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        s.radii.push_back(std::sqrt(simd::squared_distance(cloud.row(i), s.centroid)));
    }
    return s;
}

std::vector<double> cosine_matrix(const PointCloud& cloud) {
    const std::size_t k = cloud.size();
    std::vector<double> norms(k);
    for (std::size_t i = 0; i < k; ++i) {
        norms[i] = std::sqrt(simd::dot(cloud.row(i), cloud.row(i)));
        if (norms[i] == 0.0) throw Error(Errc::ZeroNormRow, "row " + std::to_string(i) + " has zero norm");
    }
    std::vector<double> m(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        m[i * k + i] = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            const double c = simd::dot(cloud.row(i), cloud.row(j)) / (norms[i] * norms[j]);
            m[i * k + j] = c;
            m[j * k + i] = c;
        }
    }
    return m;
}

}  // namespace edtr
