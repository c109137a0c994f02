#include <cmath>

#include "edtr/dirichlet.hpp"
#include "edtr/error.hpp"
#include "edtr/numeric.hpp"

namespace edtr {
namespace {

double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log1p(-p);
    return h;
}

}  // namespace

TrajectoryStats trajectory_stats(std::span<const double> token_probs,
                                 std::optional<std::span<const double>> token_entropies) {
    if (token_probs.empty()) throw Error(Errc::EmptyTokenStream, "no token probabilities");
    TrajectoryStats s;
    s.variance = population_variance(token_probs);
    if (token_entropies && !token_entropies->empty()) {
        s.entropy = mean(*token_entropies);
    } else {
        double total = 0.0;
        for (double p : token_probs) total += binary_entropy(p);
        s.entropy = total / static_cast<double>(token_probs.size());
    }
    return s;
}

TokenStatImputation TokenStatImputation::from_samples(std::span<const ReasoningSample> samples) {
    TokenStatImputation imp;
    double var_sum = 0.0;
    double ent_sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : samples) {
        for (const auto& t : s.trajectories) {
            if (!t.token_probs || t.token_probs->empty()) continue;
            std::optional<std::span<const double>> ent;
            if (t.token_entropies) ent = *t.token_entropies;
            const auto st = trajectory_stats(*t.token_probs, ent);
            var_sum += st.variance;
            ent_sum += st.entropy;
            ++count;
        }
    }
    if (count > 0) {
        imp.variance = var_sum / static_cast<double>(count);
        imp.entropy = ent_sum / static_cast<double>(count);
    }
    return imp;
}

SampleStats sample_stats(const ReasoningSample& sample, const TokenStatImputation& imputation) {
    SampleStats out;
    out.stats.reserve(sample.trajectories.size());
    for (const auto& t : sample.trajectories) {
        if (t.token_probs && !t.token_probs->empty()) {
            std::optional<std::span<const double>> ent;
            if (t.token_entropies) ent = *t.token_entropies;
            out.stats.push_back(trajectory_stats(*t.token_probs, ent));
        } else {
            out.stats.push_back({imputation.variance, imputation.entropy});
            ++out.imputed;
        }
    }
    return out;
}

}  // namespace edtr
