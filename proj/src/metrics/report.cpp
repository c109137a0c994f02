#include <cstdio>
#include <sstream>

#include "edtr/error.hpp"
#include "edtr/metrics.hpp"

namespace edtr {

namespace {

constexpr const char* kCompositeNote =
    "mean4 is a documented default, not a recovered formula: it maps (accuracy 0.550, f1 0.572, ece 0.306, "
    "brier 0.221) to 0.649, whereas a composite of 0.662 has been published for those inputs";

constexpr const char* kCsvHeader = "lo,hi,count,mean_confidence,empirical_accuracy";

std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

CalibrationReport build_report(std::span<const ScoredPrediction> preds,
                               std::span<const std::pair<std::string, std::string>> answers, std::size_t n_bins,
                               const CompositeFormula& formula) {
    CalibrationReport r;
    r.n = preds.size();
    r.bins = reliability_bins(preds, n_bins);
    r.ece = ece_from_bins(r.bins);
    r.brier = brier(preds);
    const auto af = accuracy_f1(answers);
    r.accuracy = af.accuracy;
    r.f1 = af.f1;
    r.f1_macro = af.macro;
    r.composite = composite(r.accuracy, r.f1, r.ece, r.brier, formula);
    r.composite_formula = formula.name;
    r.composite_note = formula.name == "mean4" ? kCompositeNote : formula.description;
    return r;
}

nlohmann::json calibration_report_to_json(const CalibrationReport& r) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : r.bins) {
        bins.push_back({{"lo", b.lo},
                        {"hi", b.hi},
                        {"count", b.count},
                        {"mean_confidence", b.mean_confidence},
                        {"empirical_accuracy", b.empirical_accuracy}});
    }
    return {
        {"n", r.n},
        {"accuracy", r.accuracy},
        {"f1", r.f1},
        {"f1_averaging", r.f1_macro ? "macro" : "exact_match"},
        {"ece", r.ece},
        {"brier", r.brier},
        {"composite", r.composite},
        {"metadata",
         {{"composite_formula", r.composite_formula},
          {"composite_note", r.composite_note},
          {"n_bins", r.bins.size()},
          {"binning", "equal-width, right-closed except the first bin"}}},
        {"bins", std::move(bins)},
    };
}

CalibrationReport calibration_report_from_json(const nlohmann::json& j) {
    try {
        CalibrationReport r;
        r.n = j.at("n").get<std::size_t>();
        r.accuracy = j.at("accuracy").get<double>();
        r.f1 = j.at("f1").get<double>();
        r.f1_macro = j.value("f1_averaging", std::string{}) == "macro";
        r.ece = j.at("ece").get<double>();
        r.brier = j.at("brier").get<double>();
        r.composite = j.at("composite").get<double>();
        r.composite_formula = j.at("metadata").value("composite_formula", std::string{});
        r.composite_note = j.at("metadata").value("composite_note", std::string{});
        for (const auto& b : j.at("bins")) {
            r.bins.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(), b.at("count").get<std::size_t>(),
                              b.at("mean_confidence").get<double>(), b.at("empirical_accuracy").get<double>()});
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("malformed report: ") + e.what());
    }
}

std::string reliability_csv(std::span<const ReliabilityBin> bins) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& b : bins) {
        out += exact(b.lo) + "," + exact(b.hi) + "," + std::to_string(b.count) + "," + exact(b.mean_confidence) + "," +
               exact(b.empirical_accuracy) + "\n";
    }
    return out;
}

std::vector<ReliabilityBin> parse_reliability_csv(std::string_view csv) {
    std::istringstream in{std::string(csv)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw Error(Errc::InvalidArgument, "reliability CSV lacks the expected header");
    }
    std::vector<ReliabilityBin> bins;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5) throw Error(Errc::InvalidArgument, "reliability CSV row needs 5 columns");
        try {
            bins.push_back({std::stod(cells[0]), std::stod(cells[1]), std::stoull(cells[2]), std::stod(cells[3]),
                            std::stod(cells[4])});
        } catch (const std::exception&) {
            throw Error(Errc::InvalidArgument, "reliability CSV has a non-numeric cell");
        }
    }
    return bins;
}

}  // namespace edtr
