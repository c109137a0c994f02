#include "edtr/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "edtr/error.hpp"

namespace edtr {

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double mu = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - mu) * (v - mu);
    return acc / static_cast<double>(values.size());
}

double population_stddev(std::span<const double> values) {
    return std::sqrt(population_variance(values));
}

double linear_quantile(std::span<const double> values, double q) {
    if (values.empty()) throw Error(Errc::InvalidArgument, "quantile of empty list");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace edtr
