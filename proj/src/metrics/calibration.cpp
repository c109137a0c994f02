#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "edtr/error.hpp"
#include "edtr/metrics.hpp"

namespace edtr {

namespace {

void check_predictions(std::span<const ScoredPrediction> preds) {
    if (preds.empty()) throw Error(Errc::EmptyPredictions, "no predictions");
    for (const auto& p : preds) {
        if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
            throw Error(Errc::InvalidArgument, p.query_id + ": confidence outside [0, 1]");
        }
    }
}

}  // namespace

std::size_t bin_index(double confidence, std::size_t n_bins) {
    const double scaled = std::ceil(confidence * static_cast<double>(n_bins));
    if (scaled <= 1.0) return 0;
    return std::min(static_cast<std::size_t>(scaled) - 1, n_bins - 1);
}

std::vector<ReliabilityBin> reliability_bins(std::span<const ScoredPrediction> preds, std::size_t n_bins) {
    check_predictions(preds);
    if (n_bins == 0) throw Error(Errc::InvalidArgument, "need at least one bin");
    std::vector<ReliabilityBin> bins(n_bins);
    std::vector<double> conf_sum(n_bins, 0.0);
    std::vector<double> correct_sum(n_bins, 0.0);
    for (std::size_t b = 0; b < n_bins; ++b) {
        bins[b].lo = static_cast<double>(b) / static_cast<double>(n_bins);
        bins[b].hi = static_cast<double>(b + 1) / static_cast<double>(n_bins);
    }
    for (const auto& p : preds) {
        const auto b = bin_index(p.confidence, n_bins);
        ++bins[b].count;
        conf_sum[b] += p.confidence;
        correct_sum[b] += p.correct ? 1.0 : 0.0;
    }
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (bins[b].count == 0) continue;
        const auto c = static_cast<double>(bins[b].count);
        bins[b].mean_confidence = conf_sum[b] / c;
        bins[b].empirical_accuracy = correct_sum[b] / c;
    }
    return bins;
}

double ece_from_bins(std::span<const ReliabilityBin> bins) {
    std::size_t total = 0;
    for (const auto& b : bins) total += b.count;
    if (total == 0) throw Error(Errc::EmptyPredictions, "bins are empty");
    double acc = 0.0;
    for (const auto& b : bins) {
        if (b.count == 0) continue;
        acc += static_cast<double>(b.count) / static_cast<double>(total) *
               std::abs(b.empirical_accuracy - b.mean_confidence);
    }
    return acc;
}

double ece(std::span<const ScoredPrediction> preds, std::size_t n_bins) {
    return ece_from_bins(reliability_bins(preds, n_bins));
}

double brier(std::span<const ScoredPrediction> preds) {
    check_predictions(preds);
    double acc = 0.0;
    for (const auto& p : preds) {
        const double d = p.confidence - (p.correct ? 1.0 : 0.0);
        acc += d * d;
    }
    return acc / static_cast<double>(preds.size());
}

AccuracyF1 accuracy_f1(std::span<const std::pair<std::string, std::string>> answers) {
    if (answers.empty()) throw Error(Errc::EmptyPredictions, "no answers");
    std::size_t hits = 0;
    std::set<std::string> golds;
    for (const auto& [pred, gold] : answers) {
        hits += pred == gold ? 1 : 0;
        golds.insert(gold);
    }
    AccuracyF1 out;
    out.accuracy = static_cast<double>(hits) / static_cast<double>(answers.size());
    if (golds.size() > kMacroF1MaxClasses) {
        out.f1 = out.accuracy;
        return out;
    }
    out.macro = true;
    double f1_sum = 0.0;
    for (const auto& cls : golds) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (const auto& [pred, gold] : answers) {
            if (pred == cls && gold == cls) ++tp;
            else if (pred == cls) ++fp;
            else if (gold == cls) ++fn;
        }
        const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp + fn);
        f1_sum += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    }
    out.f1 = f1_sum / static_cast<double>(golds.size());
    return out;
}

const CompositeFormula& default_composite() { return composite_formula("mean4"); }

const CompositeFormula& composite_formula(std::string_view name) {
    static const std::map<std::string, CompositeFormula, std::less<>> formulas = {
        {"mean4",
         {"mean4", "mean(accuracy, f1, 1 - ece, 1 - brier)",
          [](double a, double f, double e, double b) { return (a + f + (1.0 - e) + (1.0 - b)) / 4.0; }}},
        {"calibration",
         {"calibration", "mean(1 - ece, 1 - brier)",
          [](double, double, double e, double b) { return ((1.0 - e) + (1.0 - b)) / 2.0; }}},
        {"task", {"task", "mean(accuracy, f1)", [](double a, double f, double, double) { return (a + f) / 2.0; }}},
    };
    const auto it = formulas.find(name);
    if (it == formulas.end()) throw Error(Errc::InvalidConfig, "unknown composite formula " + std::string(name));
    return it->second;
}

double composite(double accuracy, double f1, double ece_value, double brier_value, const CompositeFormula& formula) {
    return std::clamp(formula.fn(accuracy, f1, ece_value, brier_value), 0.0, 1.0);
}

}  // namespace edtr
