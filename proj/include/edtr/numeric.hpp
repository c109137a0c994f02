#pragma once

#include <span>

namespace edtr {

/// Threshold below which a mean distance or radius counts as a collapsed cloud.
inline constexpr double kDegenerateEps = 1e-12;

double mean(std::span<const double> values);

/// Population standard deviation (divides by the count).
double population_stddev(std::span<const double> values);
double population_variance(std::span<const double> values);

/// Quantile by linear interpolation between order statistics, position (n-1)*q.
double linear_quantile(std::span<const double> values, double q);

double sigmoid(double x);
double softplus(double x);

}  // namespace edtr
