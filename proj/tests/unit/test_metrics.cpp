#include <doctest.h>

#include <cmath>
#include <random>

#include "edtr/error.hpp"
#include "edtr/metrics.hpp"

using namespace edtr;

namespace {

std::vector<ScoredPrediction> constant(double c, std::size_t n, std::size_t n_correct) {
    std::vector<ScoredPrediction> p;
    for (std::size_t i = 0; i < n; ++i) p.push_back({"q" + std::to_string(i), c, i < n_correct});
    return p;
}

std::vector<ScoredPrediction> calibrated(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ScoredPrediction> p;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = u(rng);
        p.push_back({"q" + std::to_string(i), c, u(rng) < c});
    }
    return p;
}

}  // namespace

TEST_CASE("ece fixtures") {
    CHECK(ece(constant(0.8, 10, 8)) == doctest::Approx(0.0));
    CHECK(ece(constant(0.9, 10, 5)) == doctest::Approx(0.4));
    CHECK(ece(constant(0.99, 1, 1)) == doctest::Approx(0.01));
    CHECK_THROWS_AS(ece({}), Error);
    CHECK_THROWS_AS(ece(constant(0.5, 3, 1), 0), Error);
}

TEST_CASE("brier fixtures") {
    CHECK(brier(constant(1.0, 1, 1)) == 0.0);
    CHECK(std::fabs(brier(constant(0.7, 1, 1)) - 0.09) <= 1e-12);
    CHECK(brier(constant(0.5, 7, 3)) == doctest::Approx(0.25));
    CHECK(brier(constant(0.5, 7, 0)) == doctest::Approx(0.25));
    CHECK_THROWS_AS(brier({}), Error);
}

TEST_CASE("binning") {
    CHECK(bin_index(0.0, 10) == 0);
    CHECK(bin_index(0.1, 10) == 0);
    CHECK(bin_index(0.1000001, 10) == 1);
    CHECK(bin_index(0.55, 10) == 5);
    CHECK(bin_index(1.0, 10) == 9);

    std::vector<ScoredPrediction> p;
    for (int i = 0; i < 10; ++i) p.push_back({"q", 0.05 + 0.1 * i, true});
    const auto bins = reliability_bins(p);
    REQUIRE(bins.size() == 10);
    for (const auto& b : bins) {
        CHECK(b.count == 1);
        CHECK(b.empirical_accuracy == 1.0);
    }

    const auto one = reliability_bins(constant(0.55, 6, 2));
    std::size_t nonzero = 0;
    for (const auto& b : one) nonzero += b.count > 0 ? 1 : 0;
    CHECK(nonzero == 1);
    CHECK(one[5].count == 6);
    CHECK(one[5].lo == doctest::Approx(0.5));
    CHECK(one[5].hi == doctest::Approx(0.6));

    const auto cal = calibrated(5000, 1);
    CHECK(std::fabs(ece_from_bins(reliability_bins(cal)) - ece(cal)) <= 1e-12);
    std::size_t total = 0;
    for (const auto& b : reliability_bins(cal, 7)) total += b.count;
    CHECK(total == 5000);
}

TEST_CASE("accuracy and f1") {
    using P = std::pair<std::string, std::string>;
    const std::vector<P> abc = {{"a", "a"}, {"a", "b"}, {"b", "b"}};
    const auto r = accuracy_f1(abc);
    CHECK(r.accuracy == doctest::Approx(2.0 / 3.0));
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
    CHECK(r.macro);

    const std::vector<P> perfect = {{"x", "x"}, {"y", "y"}};
    CHECK(accuracy_f1(perfect).accuracy == 1.0);
    CHECK(accuracy_f1(perfect).f1 == 1.0);

    std::vector<P> free_form;
    for (int i = 0; i < 12; ++i) free_form.push_back({std::to_string(i), std::to_string(i < 7 ? i : i + 100)});
    const auto ff = accuracy_f1(free_form);
    CHECK_FALSE(ff.macro);
    CHECK(ff.f1 == ff.accuracy);

    const std::vector<P> five = {{"1", "1"}, {"2", "2"}, {"3", "3"}, {"4", "9"}, {"5", "8"}};
    CHECK(accuracy_f1(five).accuracy == doctest::Approx(0.6));
    CHECK_THROWS_AS(accuracy_f1({}), Error);
}

TEST_CASE("composite") {
    CHECK(composite(1, 1, 0, 0) == 1.0);
    CHECK(composite(0, 0, 1, 1) == 0.0);
    CHECK(composite(0.550, 0.572, 0.306, 0.221) == doctest::Approx(0.649).epsilon(5e-4));
    CHECK(default_composite().name == "mean4");
    CHECK(composite_formula("calibration").fn(0, 0, 0.2, 0.4) == doctest::Approx(0.7));
    CHECK(composite_formula("task").fn(0.4, 0.6, 1, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(composite_formula("nope"), Error);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 0.9);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng), f = u(rng), e = u(rng), b = u(rng);
        const double c = composite(a, f, e, b);
        CHECK(composite(a + 0.1, f, e, b) >= c);
        CHECK(composite(a, f + 0.1, e, b) >= c);
        CHECK(composite(a, f, e - 0.05 * e, b) >= c);
        CHECK(composite(a, f, e, b - 0.05 * b) >= c);
    }
}

TEST_CASE("calibrated predictions have small ece") {
    const auto p = calibrated(10000, 7);
    CHECK(ece(p) < 0.02);
    auto shuffled = p;
    std::mt19937_64 rng(1);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(ece(shuffled) == doctest::Approx(ece(p)).epsilon(1e-12));
    CHECK(brier(shuffled) == doctest::Approx(brier(p)).epsilon(1e-12));
}

TEST_CASE("report export") {
    const auto p = calibrated(300, 2);
    std::vector<std::pair<std::string, std::string>> answers;
    for (const auto& x : p) answers.emplace_back(x.correct ? "a" : "b", "a");
    const auto rep = build_report(p, answers);
    CHECK(rep.n == 300);
    CHECK(rep.composite_formula == "mean4");
    CHECK(rep.composite_note.find("0.662") != std::string::npos);

    const auto j = calibration_report_to_json(rep);
    CHECK(j.at("metadata").at("composite_formula") == "mean4");
    const auto back = calibration_report_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.ece == rep.ece);
    CHECK(back.bins.size() == rep.bins.size());

    const auto csv = reliability_csv(rep.bins);
    CHECK(csv.rfind("lo,hi,count,mean_confidence,empirical_accuracy\n", 0) == 0);
    const auto parsed = parse_reliability_csv(csv);
    REQUIRE(parsed.size() == rep.bins.size());
    CHECK(std::fabs(ece_from_bins(parsed) - rep.ece) <= 1e-12);
}
