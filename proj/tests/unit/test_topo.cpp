#include <doctest.h>

#include <cmath>
#include <random>

#include "edtr/atomic_file.hpp"
#include "edtr/error.hpp"
#include "edtr/fusion.hpp"
#include "edtr/topo.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace edtr;

namespace {

PointCloud cloud(const std::vector<std::vector<double>>& rows) { return PointCloud::from_rows(rows); }

DistanceSummary summary_of(const std::vector<std::vector<double>>& rows) { return distance_summary(cloud(rows)); }

DistanceSummary with_radii(std::vector<double> radii) {
    DistanceSummary s;
    s.k = radii.size();
    s.radii = std::move(radii);
    return s;
}

}  // namespace

TEST_CASE("default weights") {
    FeatureWeights w;
    double total = 0.0;
    for (double x : w.w) total += x;
    CHECK(std::fabs(total - 1.0) <= 1e-12);
    CHECK(w.w[0] == 0.20);
    CHECK(w.w[1] == 0.25);
    CHECK(w.w[3] == 0.20);
    w.validate();
    w.w[0] = 0.3;
    CHECK_THROWS_AS(w.validate(), Error);
    w.w[0] = -0.05;
    w.w[1] = 0.50;
    CHECK_THROWS_AS(w.validate(), Error);
}

TEST_CASE("weights from a config file section") {
    fixture::TempDir dir("weights");
    write_file_atomic(dir / "c.ini", "seed = 3\n[topo.weights]\nw1 = 0.30\nw2 = 0.15\n");
    const auto w = FeatureWeights::from_config_file(dir / "c.ini");
    CHECK(w.w[0] == 0.30);
    CHECK(w.w[1] == 0.15);
    CHECK(w.w[2] == 0.10);
    write_file_atomic(dir / "bad.ini", "[topo.weights]\nw1 = 0.9\n");
    CHECK_THROWS_AS(FeatureWeights::from_config_file(dir / "bad.ini"), Error);
    write_file_atomic(dir / "nan.ini", "[topo.weights]\nw1 = abc\n");
    CHECK_THROWS_AS(FeatureWeights::from_config_file(dir / "nan.ini"), Error);
}

TEST_CASE("spread") {
    CHECK(reasoning_spread(summary_of(fixture::identical(3))) == 0.0);
    CHECK(reasoning_spread(summary_of(fixture::collinear())) == doctest::Approx(0.4714).epsilon(1e-4));
    CHECK(reasoning_spread(summary_of(fixture::unit_square())) == doctest::Approx(0.1952).epsilon(1e-3));
}

TEST_CASE("consistency") {
    CHECK(consistency_score(cosine_matrix(cloud({{1, 2}, {1, 2}})), 2) == doctest::Approx(0.0));
    CHECK(consistency_score(cosine_matrix(cloud({{1, 0}, {0, 1}})), 2) == doctest::Approx(1.0));
    CHECK(consistency_score(cosine_matrix(cloud({{1, 0}, {-1, 0}})), 2) == doctest::Approx(2.0));
}

TEST_CASE("complexity") {
    CHECK(complexity_entropy(summary_of(fixture::identical(3))) == 0.0);
    CHECK(complexity_entropy(summary_of(fixture::collinear())) == doctest::Approx(0.3536).epsilon(1e-3));
    std::mt19937_64 rng(1);
    const auto rows = fixture::random_rows(rng, 6, 5);
    CHECK(complexity_entropy(distance_summary(cloud(rows).scaled(3.7))) ==
          doctest::Approx(complexity_entropy(distance_summary(cloud(rows)))).epsilon(1e-12));
}

TEST_CASE("stability") {
    CHECK(stability_score(summary_of(fixture::identical(5))) == doctest::Approx(0.5));
    CHECK(stability_score(summary_of({{0, 0}, {2, 0}})) == doctest::Approx(2.0));
    CHECK(stability_score(summary_of(fixture::two_pairs())) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("coherence") {
    CHECK(coherence_score(summary_of({{0, 0}, {2, 0}})) == doctest::Approx(0.0));
    CHECK(coherence_score(summary_of(fixture::identical(3))) == 0.0);
    CHECK(coherence_score(summary_of(fixture::collinear())) == doctest::Approx(0.7071).epsilon(1e-4));
}

TEST_CASE("diversity") {
    DistanceSummary s;
    s.mean = 0.5;
    CHECK(diversity_penalty(s) == 0.0);
    s.mean = 1.0;
    CHECK(diversity_penalty(s) == 0.0);
    CHECK(diversity_penalty(summary_of(fixture::collinear())) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("outlier") {
    CHECK(outlier_risk(with_radii({2, 2, 2, 2})) == 0.0);
    CHECK(outlier_risk(with_radii({1, 1, 1, 1, 100})) == doctest::Approx(0.2));
    CHECK(outlier_risk(with_radii({1, 2, 3, 4, 5})) == 0.0);
    // Radii that are equal up to rounding do not cross a zero-width fence.
    CHECK(outlier_risk(with_radii({1.0, 1.0, 1.0, 1.0 + 1e-15})) == 0.0);
}

TEST_CASE("cluster quality") {
    CHECK(cluster_quality(cloud(fixture::two_pairs()), 0) < 0.05);
    CHECK(cluster_quality(cloud(fixture::identical(4)), 0) == 0.0);
    std::mt19937_64 rng(12);
    const auto pc = cloud(fixture::random_rows(rng, 5, 8));
    CHECK(cluster_quality(pc, 77) == cluster_quality(pc, 77));
}

TEST_CASE("profile fixtures") {
    const auto p = topo_profile(cloud(fixture::identical(5)), {}, 0);
    const std::array<double, 8> expect = {0, 0, 0, 0.5, 0, 0, 0, 0};
    CHECK(p.raw() == expect);
    CHECK(p.risk == doctest::Approx(0.10));

    const auto anti = topo_profile(cloud({{1, 0}, {-1, 0}}), {}, 0);
    CHECK(anti.consistency == doctest::Approx(2.0));
    CHECK(anti.clamped[1]);
    CHECK(anti.clamped_features()[1] == 1.0);
    CHECK(anti.stability == doctest::Approx(2.0));
    CHECK(anti.clamped[3]);
    CHECK(anti.risk <= 1.0);
    CHECK_THROWS_AS(topo_profile(cloud({{0, 0}, {1, 0}}), {}, 0), Error);
}

TEST_CASE("features match the brute-force oracle") {
    std::mt19937_64 rng(99);
    const FeatureWeights w;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t k = 2 + rng() % 6, dim = 2 + rng() % 10;
        const auto rows = fixture::random_rows(rng, k, dim, trial % 2 ? 0.2 : 1.0);
        const auto p = topo_profile(cloud(rows), w, trial);
        const auto o = oracle::features(rows, w.w);
        const auto got = p.raw();
        for (std::size_t i = 0; i < 8; ++i) {
            CAPTURE(i);
            CHECK(std::fabs(got[i] - o.values[i]) <= 1e-9);
        }
        CHECK(std::fabs(p.risk - o.risk) <= 1e-9);
    }
}

TEST_CASE("risk properties") {
    std::mt19937_64 rng(4);
    const FeatureWeights w;
    for (int trial = 0; trial < 200; ++trial) {
        std::array<double, 8> f{};
        std::uniform_real_distribution<double> u(-0.5, 2.5);
        for (double& x : f) x = u(rng);
        std::array<bool, 8> clamped{};
        const double r = aggregate_risk(f, w, &clamped);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK(clamped[i] == (f[i] < 0.0 || f[i] > 1.0));
            auto g = f;
            g[i] += 0.1;
            CHECK(aggregate_risk(g, w) >= r);
        }
    }
}

TEST_CASE("scale behaviour") {
    std::mt19937_64 rng(17);
    const auto rows = fixture::random_rows(rng, 6, 7);
    const auto a = topo_profile(cloud(rows), {}, 1);
    const auto b = topo_profile(cloud(rows).scaled(2.5), {}, 1);
    CHECK(b.consistency == doctest::Approx(a.consistency).epsilon(1e-12));
    CHECK(b.complexity == doctest::Approx(a.complexity).epsilon(1e-12));
    CHECK(b.coherence == doctest::Approx(a.coherence).epsilon(1e-12));
    CHECK(b.spread == doctest::Approx(2.5 * a.spread).epsilon(1e-12));
    CHECK(distance_summary(cloud(rows).scaled(2.5)).mean ==
          doctest::Approx(2.5 * distance_summary(cloud(rows)).mean).epsilon(1e-12));
}

TEST_CASE("confident synthetic samples carry less risk") {
    const auto ds = synth_dataset(GeneratorSpec{}, 42);
    double conf = 0.0, unc = 0.0;
    std::size_t nc = 0, nu = 0;
    for (const auto& s : ds.samples) {
        std::vector<std::vector<double>> rows;
        for (const auto& t : s.trajectories) rows.push_back(t.embedding);
        const double r = topo_profile(cloud(rows), {}, 0).risk;
        if (*s.correct) {
            conf += r;
            ++nc;
        } else {
            unc += r;
            ++nu;
        }
    }
    CHECK(conf / nc < unc / nu);
}
