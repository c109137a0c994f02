#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "edtr/ingest.hpp"

namespace edtr {

// ---------------------------------------------------------------------------
// Token statistics

struct TrajectoryStats {
    double variance = 0.0;  // population variance of chosen-token probabilities
    double entropy = 0.0;   // mean per-token entropy, nats
};

/// Entropy is the mean of `token_entropies` when given, otherwise the mean
/// binary entropy of each chosen probability (0 ln 0 = 0).
TrajectoryStats trajectory_stats(std::span<const double> token_probs,
                                 std::optional<std::span<const double>> token_entropies = std::nullopt);

/// Fill-in for trajectories without token statistics. The defaults are the
/// moments of a uniform chosen-token probability: variance 1/12 and mean
/// binary entropy 1/2 nat.
struct TokenStatImputation {
    double variance = 1.0 / 12.0;
    double entropy = 0.5;

    /// Mean statistics over every trajectory that carries token probabilities.
    static TokenStatImputation from_samples(std::span<const ReasoningSample> samples);
};

struct SampleStats {
    std::vector<TrajectoryStats> stats;
    std::size_t imputed = 0;
};

SampleStats sample_stats(const ReasoningSample& sample, const TokenStatImputation& imputation);

// ---------------------------------------------------------------------------
// Dirichlet head: 2k -> 128 -> 64 -> n

inline constexpr std::size_t kHiddenWidth1 = 128;
inline constexpr std::size_t kHiddenWidth2 = 64;
inline constexpr std::size_t kDefaultMaxComponents = 5;
inline constexpr int kHeadFormatVersion = 1;

enum class Activation { Relu, Tanh };

struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;  // out x in, row-major
    std::vector<double> bias;

    std::span<const double> row(std::size_t r) const { return {weights.data() + r * in, in}; }
    std::span<double> row(std::size_t r) { return {weights.data() + r * in, in}; }
};

struct HeadParameters {
    std::size_t k = 0;
    std::size_t n = 0;
    Activation activation = Activation::Relu;
    std::array<DenseLayer, 3> layers;

    static HeadParameters zeros(std::size_t k, std::size_t n, Activation activation = Activation::Relu);
    /// He-scaled Gaussian weights, zero biases.
    static HeadParameters random(std::size_t k, std::size_t n, std::uint64_t seed,
                                 Activation activation = Activation::Relu);

    std::size_t parameter_count() const;
    std::vector<double> flat() const;
    void assign_flat(std::span<const double> values);
    void validate() const;
};

/// Interleaved [var_1, H_1, ..., var_k, H_k].
std::vector<double> head_input(std::span<const TrajectoryStats> stats);

/// alpha = softplus(MLP(x)) + 1, length params.n.
std::vector<double> head_forward(const HeadParameters& params, std::span<const TrajectoryStats> stats);

// ---------------------------------------------------------------------------
// Dirichlet features and confidence

enum class EntropyConfidenceForm {
    SignCorrected,  // 1 / (1 + sum[psi(a0) - psi(a_i)])
    Raw,            // 1 / (1 + sum[psi(a_i) - psi(a0)]), kept for comparison only
};

struct DirichletFeatures {
    double concentration = 0.0;
    double diff_entropy = 0.0;
    double expected_max = 0.0;
    double top_class_variance = 0.0;

    std::array<double, 4> as_array() const { return {concentration, diff_entropy, expected_max, top_class_variance}; }
};

DirichletFeatures dirichlet_features(std::span<const double> alpha);
double entropy_confidence(std::span<const double> alpha,
                          EntropyConfidenceForm form = EntropyConfidenceForm::SignCorrected);
/// Mean of expected max probability, sigmoid(a0 - n) and entropy confidence,
/// clipped to [0.01, 0.99].
double dirichlet_confidence(std::span<const double> alpha,
                            EntropyConfidenceForm form = EntropyConfidenceForm::SignCorrected);

struct DirichletProfile {
    std::vector<double> alpha;
    DirichletFeatures features;
    double entropy_conf = 0.0;
    double conf_dir = 0.0;
};

DirichletProfile dirichlet_profile(std::span<const double> alpha,
                                   EntropyConfidenceForm form = EntropyConfidenceForm::SignCorrected);

/// Components for a sample: distinct answers, capped at `max_components`.
std::size_t component_count(const ReasoningSample& sample, std::size_t max_components);

// ---------------------------------------------------------------------------
// Training

struct HeadExample {
    std::vector<TrajectoryStats> stats;
    std::size_t n_components = 2;
    std::optional<std::size_t> target;  // one-hot index; nullopt means a uniform target
};

/// Target is the vote rank of the gold answer among the first
/// `n_components` ranked answers, uniform when the gold answer is absent.
/// Requires a labeled sample.
HeadExample head_example(const ReasoningSample& sample, const TokenStatImputation& imputation,
                         std::size_t max_components);

std::vector<double> target_distribution(const HeadExample& example);

/// Squared-error Bayes risk of Dir(alpha) against target y.
double evidential_loss(std::span<const double> alpha, std::span<const double> target);

/// Loss of one example; when `gradient` is non-null it receives dLoss/dtheta
/// in the same layout as `params`.
double head_loss_and_gradient(const HeadParameters& params, const HeadExample& example, HeadParameters* gradient);

double mean_head_loss(const HeadParameters& params, std::span<const HeadExample> examples);

struct HeadTrainingSpec {
    std::size_t epochs = 50;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

struct HeadTrainingResult {
    HeadParameters params;
    std::vector<double> loss_history;  // initial loss, then after each epoch
};

/// Mini-batch Adam on the mean evidential loss.
HeadTrainingResult train_head(HeadParameters params, std::span<const HeadExample> examples,
                              const HeadTrainingSpec& spec);

// ---------------------------------------------------------------------------
// Persistence

nlohmann::json head_to_json(const HeadParameters& params);
HeadParameters head_from_json(const nlohmann::json& j);

}  // namespace edtr
