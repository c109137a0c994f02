#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "edtr/error.hpp"
#include "edtr/numeric.hpp"
#include "edtr/simd/kernels.hpp"
#include "forward.hpp"

namespace edtr {

HeadExample head_example(const ReasoningSample& sample, const TokenStatImputation& imputation,
                         std::size_t max_components) {
    if (!sample.gold_answer) throw Error(Errc::InvalidArgument, sample.query_id + ": unlabeled sample");
    HeadExample ex;
    ex.stats = sample_stats(sample, imputation).stats;
    const auto ranked = ranked_answers(sample.trajectories);
    ex.n_components = std::min(ranked.size(), max_components);
    for (std::size_t i = 0; i < ex.n_components; ++i) {
        if (ranked[i] == *sample.gold_answer) ex.target = i;
    }
    return ex;
}

std::vector<double> target_distribution(const HeadExample& example) {
    const std::size_t n = example.n_components;
    if (n == 0) throw Error(Errc::InconsistentN, "example has no components");
    if (example.target) {
        if (*example.target >= n) throw Error(Errc::InconsistentN, "target index outside component range");
        std::vector<double> y(n, 0.0);
        y[*example.target] = 1.0;
        return y;
    }
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

double evidential_loss(std::span<const double> alpha, std::span<const double> target) {
    if (alpha.size() != target.size()) throw Error(Errc::DimensionMismatch, "alpha/target length mismatch");
    const double a0 = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    double loss = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        const double p = alpha[j] / a0;
        loss += (target[j] - p) * (target[j] - p) + p * (1.0 - p) / (a0 + 1.0);
    }
    return loss;
}

namespace {

// dLoss/dalpha for the first y.size() components.
//   L = sum (y_j - p_j)^2 + (1 - sum p_j^2) / (S + 1),  p_j = alpha_j / S
std::vector<double> loss_gradient_alpha(std::span<const double> alpha, std::span<const double> y) {
    const std::size_t n = y.size();
    const double s = std::accumulate(alpha.begin(), alpha.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    std::vector<double> p(n), g(n);
    double sum_p2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        p[j] = alpha[j] / s;
        sum_p2 += p[j] * p[j];
    }
    double gp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        g[j] = -2.0 * (y[j] - p[j]) - 2.0 * p[j] / (s + 1.0);
        gp += g[j] * p[j];
    }
    const double explicit_s = -(1.0 - sum_p2) / ((s + 1.0) * (s + 1.0));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (g[i] - gp) / s + explicit_s;
    return out;
}

void check_example(const HeadParameters& params, const HeadExample& ex) {
    if (ex.stats.size() != params.k) {
        throw Error(Errc::DimensionMismatch, "example has " + std::to_string(ex.stats.size()) +
                                                 " trajectories, head expects " + std::to_string(params.k));
    }
    if (ex.n_components < 1 || ex.n_components > params.n) {
        throw Error(Errc::InconsistentN, "example uses " + std::to_string(ex.n_components) +
                                             " components, head provides " + std::to_string(params.n));
    }
}

}  // namespace

double head_loss_and_gradient(const HeadParameters& params, const HeadExample& example, HeadParameters* gradient) {
    check_example(params, example);
    detail::ForwardCache c;
    detail::forward(params, example.stats, c);
    const auto y = target_distribution(example);
    const std::size_t n = example.n_components;
    const std::span<const double> alpha(c.alpha.data(), n);
    const double loss = evidential_loss(alpha, y);
    if (!gradient) return loss;

    if (gradient->k != params.k || gradient->n != params.n) *gradient = HeadParameters::zeros(params.k, params.n);
    const auto dalpha = loss_gradient_alpha(alpha, y);

    const auto& l3 = params.layers[2];
    auto& g3 = gradient->layers[2];
    std::vector<double> d_act2(l3.in, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double delta = dalpha[j] * sigmoid(c.logits[j]);  // softplus' = sigmoid
        g3.bias[j] += delta;
        simd::axpy(delta, c.act2, g3.row(j));
        simd::axpy(delta, l3.row(j), d_act2);
    }

    const auto& l2 = params.layers[1];
    auto& g2 = gradient->layers[1];
    std::vector<double> d_act1(l2.in, 0.0);
    for (std::size_t r = 0; r < l2.out; ++r) {
        const double delta = d_act2[r] * detail::activate_derivative(params.activation, c.pre2[r]);
        if (delta == 0.0) continue;
        g2.bias[r] += delta;
        simd::axpy(delta, c.act1, g2.row(r));
        simd::axpy(delta, l2.row(r), d_act1);
    }

    const auto& l1 = params.layers[0];
    auto& g1 = gradient->layers[0];
    for (std::size_t r = 0; r < l1.out; ++r) {
        const double delta = d_act1[r] * detail::activate_derivative(params.activation, c.pre1[r]);
        if (delta == 0.0) continue;
        g1.bias[r] += delta;
        simd::axpy(delta, c.input, g1.row(r));
    }
    return loss;
}

double mean_head_loss(const HeadParameters& params, std::span<const HeadExample> examples) {
    if (examples.empty()) return 0.0;
    double total = 0.0;
    for (const auto& ex : examples) total += head_loss_and_gradient(params, ex, nullptr);
    return total / static_cast<double>(examples.size());
}

HeadTrainingResult train_head(HeadParameters params, std::span<const HeadExample> examples,
                              const HeadTrainingSpec& spec) {
    if (!(spec.learning_rate > 0.0) || spec.batch_size == 0) {
        throw Error(Errc::InvalidHyper, "learning rate and batch size must be positive");
    }
    params.validate();
    for (const auto& ex : examples) check_example(params, ex);

    HeadTrainingResult result;
    result.loss_history.push_back(mean_head_loss(params, examples));
    if (spec.epochs == 0 || examples.empty()) {
        result.params = std::move(params);
        return result;
    }

    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kAdamEps = 1e-8;
    const std::size_t count = params.parameter_count();
    std::vector<double> theta = params.flat();
    std::vector<double> m(count, 0.0), v(count, 0.0);
    std::size_t step = 0;

    std::mt19937_64 rng(spec.seed);
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    HeadParameters grad = HeadParameters::zeros(params.k, params.n, params.activation);

    for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
            const std::size_t end = std::min(start + spec.batch_size, order.size());
            grad.assign_flat(std::vector<double>(count, 0.0));
            for (std::size_t i = start; i < end; ++i) head_loss_and_gradient(params, examples[order[i]], &grad);
            const auto g = grad.flat();
            const double scale = 1.0 / static_cast<double>(end - start);

            ++step;
            const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
            const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
            for (std::size_t p = 0; p < count; ++p) {
                const double gp = g[p] * scale;
                m[p] = kBeta1 * m[p] + (1.0 - kBeta1) * gp;
                v[p] = kBeta2 * v[p] + (1.0 - kBeta2) * gp * gp;
                theta[p] -= spec.learning_rate * (m[p] / bias1) / (std::sqrt(v[p] / bias2) + kAdamEps);
            }
            params.assign_flat(theta);
        }
        result.loss_history.push_back(mean_head_loss(params, examples));
    }
    result.params = std::move(params);
    return result;
}

}  // namespace edtr
