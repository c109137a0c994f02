#include <cmath>

#include "edtr/error.hpp"
#include "edtr/geometry.hpp"

namespace edtr {

PointCloud::PointCloud(std::size_t k, std::size_t dim, std::vector<double> values)
    : k_(k), dim_(dim), values_(std::move(values)) {
    if (k_ < 2) throw Error(Errc::InvalidArgument, "point cloud needs at least 2 points");
    if (dim_ == 0) throw Error(Errc::InvalidArgument, "point cloud dimension must be positive");
    if (values_.size() != k_ * dim_) throw Error(Errc::DimensionMismatch, "point cloud storage size mismatch");
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteInput, "point cloud contains a non-finite value");
    }
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error(Errc::InvalidArgument, "point cloud needs at least 2 points");
    const std::size_t dim = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * dim);
    for (const auto& r : rows) {
        if (r.size() != dim) throw Error(Errc::DimensionMismatch, "ragged point cloud rows");
        values.insert(values.end(), r.begin(), r.end());
    }
    return PointCloud(rows.size(), dim, std::move(values));
}

PointCloud PointCloud::scaled(double factor) const {
    auto values = values_;
    for (auto& v : values) v *= factor;
    return PointCloud(k_, dim_, std::move(values));
}

PointCloud PointCloud::permuted(std::span<const std::size_t> order) const {
    if (order.size() != k_) throw Error(Errc::InvalidArgument, "permutation length mismatch");
    std::vector<double> values;
    values.reserve(values_.size());
    for (std::size_t i : order) {
        const auto r = row(i);
        values.insert(values.end(), r.begin(), r.end());
    }
    return PointCloud(k_, dim_, std::move(values));
}

}  // namespace edtr
