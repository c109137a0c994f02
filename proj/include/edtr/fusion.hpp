#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "edtr/dirichlet.hpp"
#include "edtr/homology.hpp"
#include "edtr/ingest.hpp"
#include "edtr/topo.hpp"

namespace edtr {

enum class FusionMode { Fixed, Trained };

std::string_view to_string(FusionMode mode);
FusionMode fusion_mode_from_string(std::string_view name);

/// C = sigmoid(scale * (w_topo * (1 - risk) + w_dir * conf_dir) + bias).
/// The default scale and bias map a blend of 0.5 to C = 0.5.
struct FixedFusion {
    double w_topo = 0.6;
    double w_dir = 0.4;
    double scale = 4.0;
    double bias = -2.0;

    void validate() const;
};

double fuse_fixed(double risk_topo, double conf_dir, const FixedFusion& params = {});

// 8 clamped topology features, 4 Dirichlet features, conf_dir.
inline constexpr std::size_t kFusedFeatureCount = 13;
using FusedFeatures = std::array<double, kFusedFeatureCount>;
extern const std::array<std::string_view, kFusedFeatureCount> kFusedFeatureNames;

FusedFeatures fused_features(const TopoProfile& topo, const DirichletProfile& dirichlet);

struct LabeledFeatures {
    FusedFeatures features{};
    bool correct = false;
};

struct CombinerSpec {
    std::size_t iterations = 2000;
    double learning_rate = 0.5;
    double l2 = 1e-3;
    std::uint64_t seed = 0;  // recorded as provenance; the fit itself starts from zero
};

/// Logistic regression over standardized fused features.
struct TrainedCombiner {
    FusedFeatures weights{};
    double intercept = 0.0;
    FusedFeatures feature_mean{};
    FusedFeatures feature_scale = filled(1.0);
    std::optional<std::string> warning;
    std::string training_hash;
    std::uint64_t seed = 0;
    CombinerSpec spec;

    double predict(const FusedFeatures& features) const;

private:
    static FusedFeatures filled(double v) {
        FusedFeatures f;
        f.fill(v);
        return f;
    }
};

/// Gradient descent on the L2-regularized mean log-loss (intercept not
/// penalized). A single-class training set yields an intercept-only model at
/// the smoothed base rate with warning "single_class_training".
TrainedCombiner fit_combiner(std::span<const LabeledFeatures> samples, const CombinerSpec& spec = {});

struct FusionParameters {
    FusionMode mode = FusionMode::Fixed;
    FixedFusion fixed;
    std::optional<TrainedCombiner> trained;
};

inline constexpr int kFusionFormatVersion = 1;
nlohmann::json fusion_to_json(const FusionParameters& params);
FusionParameters fusion_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// End-to-end scoring

struct ScoreOptions {
    FeatureWeights weights;
    std::uint64_t seed = 0;
    bool diagnostics = false;
    std::size_t h1_cap = kDefaultH1Cap;
    EntropyConfidenceForm entropy_form = EntropyConfidenceForm::SignCorrected;
    TokenStatImputation imputation;
};

struct HomologyDiagnostics {
    Barcode h0;
    Barcode h1;
    PersistenceStats stats;
};

struct ConfidenceReport {
    std::string query_id;
    double confidence = 0.5;
    double conf_topo = 0.0;
    double risk_topo = 0.0;
    double conf_dir = 0.0;
    FusionMode mode = FusionMode::Fixed;
    TopoProfile topo;
    DirichletProfile dirichlet;
    FusedFeatures features{};
    std::size_t n_components = 0;
    std::size_t imputed_trajectories = 0;
    std::optional<HomologyDiagnostics> diagnostics;
};

nlohmann::json report_to_json(const ConfidenceReport& report);

/// Topology profile, Dirichlet head, then fusion. Errors carry the query id.
ConfidenceReport score_sample(const ReasoningSample& sample, const HeadParameters& head,
                              const FusionParameters& fusion, const ScoreOptions& options);

/// Scores every sample, fanning out over `jobs` threads; output order equals input order.
std::vector<ConfidenceReport> score_samples(std::span<const ReasoningSample> samples, const HeadParameters& head,
                                            const FusionParameters& fusion, const ScoreOptions& options,
                                            std::size_t jobs = 1);

}  // namespace edtr
