#pragma once

#include <vector>

#include "edtr/dirichlet.hpp"

namespace edtr::detail {

struct ForwardCache {
    std::vector<double> input;
    std::vector<double> pre1, act1;
    std::vector<double> pre2, act2;
    std::vector<double> logits;
    std::vector<double> alpha;
};

void forward(const HeadParameters& params, std::span<const TrajectoryStats> stats, ForwardCache& cache);

double activate(Activation a, double x);
double activate_derivative(Activation a, double pre);

}  // namespace edtr::detail
