#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace edtr {

struct ScoredPrediction {
    std::string query_id;
    double confidence = 0.5;  // finite, in [0, 1]
    bool correct = false;
};

inline constexpr std::size_t kDefaultBins = 10;

/// Equal-width bin over [0, 1]; bins are (lo, hi] except the first, which is [0, hi].
struct ReliabilityBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double mean_confidence = 0.0;
    double empirical_accuracy = 0.0;
};

std::size_t bin_index(double confidence, std::size_t n_bins);
std::vector<ReliabilityBin> reliability_bins(std::span<const ScoredPrediction> preds, std::size_t n_bins = kDefaultBins);

/// Count-weighted mean |accuracy - confidence| over the given bins.
double ece_from_bins(std::span<const ReliabilityBin> bins);
double ece(std::span<const ScoredPrediction> preds, std::size_t n_bins = kDefaultBins);
double brier(std::span<const ScoredPrediction> preds);

struct AccuracyF1 {
    double accuracy = 0.0;
    double f1 = 0.0;
    bool macro = false;  // false when the free-form fallback (F1 = accuracy) applied
};

inline constexpr std::size_t kMacroF1MaxClasses = 10;

/// Pairs of (predicted, gold) normalized answers. F1 is macro-averaged over
/// gold classes when there are at most 10 of them, else equals accuracy.
AccuracyF1 accuracy_f1(std::span<const std::pair<std::string, std::string>> answers);

struct CompositeFormula {
    std::string name;
    std::string description;
    std::function<double(double accuracy, double f1, double ece, double brier)> fn;
};

/// "mean4": mean(accuracy, f1, 1 - ece, 1 - brier).
const CompositeFormula& default_composite();
/// Known formulas: "mean4", "calibration" (mean(1 - ece, 1 - brier)), "task" (mean(accuracy, f1)).
const CompositeFormula& composite_formula(std::string_view name);
double composite(double accuracy, double f1, double ece, double brier,
                 const CompositeFormula& formula = default_composite());

struct CalibrationReport {
    std::size_t n = 0;
    double accuracy = 0.0;
    double f1 = 0.0;
    bool f1_macro = false;
    double ece = 0.0;
    double brier = 0.0;
    double composite = 0.0;
    std::string composite_formula;
    std::string composite_note;
    std::vector<ReliabilityBin> bins;
};

CalibrationReport build_report(std::span<const ScoredPrediction> preds,
                               std::span<const std::pair<std::string, std::string>> answers,
                               std::size_t n_bins = kDefaultBins,
                               const CompositeFormula& formula = default_composite());

nlohmann::json calibration_report_to_json(const CalibrationReport& report);
CalibrationReport calibration_report_from_json(const nlohmann::json& j);

/// Header lo,hi,count,mean_confidence,empirical_accuracy; values printed with
/// round-trip precision.
std::string reliability_csv(std::span<const ReliabilityBin> bins);
std::vector<ReliabilityBin> parse_reliability_csv(std::string_view csv);

}  // namespace edtr
