#include <cmath>
#include <random>

#include "edtr/error.hpp"
#include "edtr/numeric.hpp"
#include "edtr/simd/kernels.hpp"
#include "forward.hpp"

namespace edtr {
namespace {

DenseLayer make_layer(std::size_t in, std::size_t out) {
    return DenseLayer{in, out, std::vector<double>(in * out, 0.0), std::vector<double>(out, 0.0)};
}

void dense(const DenseLayer& layer, std::span<const double> x, std::vector<double>& out) {
    out.resize(layer.out);
    for (std::size_t r = 0; r < layer.out; ++r) out[r] = simd::dot(layer.row(r), x) + layer.bias[r];
}

}  // namespace

HeadParameters HeadParameters::zeros(std::size_t k, std::size_t n, Activation activation) {
    if (k < 1 || n < 1) throw Error(Errc::InvalidArgument, "head needs k >= 1 and n >= 1");
    HeadParameters p;
    p.k = k;
    p.n = n;
    p.activation = activation;
    p.layers = {make_layer(2 * k, kHiddenWidth1), make_layer(kHiddenWidth1, kHiddenWidth2),
                make_layer(kHiddenWidth2, n)};
    return p;
}

HeadParameters HeadParameters::random(std::size_t k, std::size_t n, std::uint64_t seed, Activation activation) {
    auto p = zeros(k, n, activation);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        auto& layer = p.layers[l];
        const double gain = (l + 1 < p.layers.size() && activation == Activation::Relu) ? 2.0 : 1.0;
        std::normal_distribution<double> normal(0.0, std::sqrt(gain / static_cast<double>(layer.in)));
        for (auto& w : layer.weights) w = normal(rng);
    }
    return p;
}

std::size_t HeadParameters::parameter_count() const {
    std::size_t total = 0;
    for (const auto& l : layers) total += l.weights.size() + l.bias.size();
    return total;
}

std::vector<double> HeadParameters::flat() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& l : layers) {
        out.insert(out.end(), l.weights.begin(), l.weights.end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

void HeadParameters::assign_flat(std::span<const double> values) {
    if (values.size() != parameter_count()) throw Error(Errc::DimensionMismatch, "flat parameter length mismatch");
    std::size_t pos = 0;
    for (auto& l : layers) {
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), l.weights.size(), l.weights.begin());
        pos += l.weights.size();
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(), l.bias.begin());
        pos += l.bias.size();
    }
}

void HeadParameters::validate() const {
    const std::array<std::size_t, 4> widths = {2 * k, kHiddenWidth1, kHiddenWidth2, n};
    if (k < 1 || n < 1) throw Error(Errc::IncompatibleParameters, "head needs k >= 1 and n >= 1");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        if (layer.in != widths[l] || layer.out != widths[l + 1] || layer.weights.size() != layer.in * layer.out ||
            layer.bias.size() != layer.out) {
            throw Error(Errc::IncompatibleParameters, "head layer " + std::to_string(l) + " has inconsistent shape");
        }
        for (double v : layer.weights) {
            if (!std::isfinite(v)) throw Error(Errc::IncompatibleParameters, "non-finite head weight");
        }
        for (double v : layer.bias) {
            if (!std::isfinite(v)) throw Error(Errc::IncompatibleParameters, "non-finite head bias");
        }
    }
}

std::vector<double> head_input(std::span<const TrajectoryStats> stats) {
    std::vector<double> x;
    x.reserve(2 * stats.size());
    for (const auto& s : stats) {
        x.push_back(s.variance);
        x.push_back(s.entropy);
    }
    return x;
}

namespace detail {

double activate(Activation a, double x) { return a == Activation::Relu ? std::max(x, 0.0) : std::tanh(x); }

double activate_derivative(Activation a, double pre) {
    if (a == Activation::Relu) return pre > 0.0 ? 1.0 : 0.0;
    const double t = std::tanh(pre);
    return 1.0 - t * t;
}

void forward(const HeadParameters& params, std::span<const TrajectoryStats> stats, ForwardCache& cache) {
    if (stats.size() != params.k) {
        throw Error(Errc::DimensionMismatch, "head expects " + std::to_string(params.k) + " trajectories, got " +
                                                 std::to_string(stats.size()));
    }
    cache.input = head_input(stats);
    dense(params.layers[0], cache.input, cache.pre1);
    cache.act1.resize(cache.pre1.size());
    for (std::size_t i = 0; i < cache.pre1.size(); ++i) cache.act1[i] = activate(params.activation, cache.pre1[i]);
    dense(params.layers[1], cache.act1, cache.pre2);
    cache.act2.resize(cache.pre2.size());
    for (std::size_t i = 0; i < cache.pre2.size(); ++i) cache.act2[i] = activate(params.activation, cache.pre2[i]);
    dense(params.layers[2], cache.act2, cache.logits);
    cache.alpha.resize(cache.logits.size());
    // 1 + softplus(z) rounds to exactly 1 once z < -37; keep alpha strictly above 1.
    const double floor = std::nextafter(1.0, 2.0);
    for (std::size_t i = 0; i < cache.logits.size(); ++i) {
        cache.alpha[i] = std::max(softplus(cache.logits[i]) + 1.0, floor);
    }
}

}  // namespace detail

std::vector<double> head_forward(const HeadParameters& params, std::span<const TrajectoryStats> stats) {
    detail::ForwardCache cache;
    detail::forward(params, stats, cache);
    return std::move(cache.alpha);
}

}  // namespace edtr
