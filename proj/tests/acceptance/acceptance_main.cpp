// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include "edtr/atomic_file.hpp"
#include "edtr/cli.hpp"
#include "edtr/dirichlet.hpp"
#include "edtr/homology.hpp"
#include "edtr/metrics.hpp"
#include "edtr/topo.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace edtr;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_s;  // 0 for no runtime bound
    std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Clouds at mixed scales so DBSCAN, the outlier fence and KMeans all see
// non-trivial structure.
std::vector<std::vector<double>> mixed_cloud(std::mt19937_64& rng, std::size_t k, std::size_t dim) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double scale = std::pow(10.0, -1.5 + 1.8 * u(rng)) / std::sqrt(static_cast<double>(dim)) * 2.0;
    auto rows = fixture::random_rows(rng, k, dim, scale);
    const int shape = static_cast<int>(rng() % 4);
    if (shape == 1) {  // two blobs
        for (std::size_t i = 0; i < k; i += 2) rows[i][0] += 3.0 * scale * std::sqrt(static_cast<double>(dim));
    } else if (shape == 2) {  // one far point
        for (auto& x : rows[rng() % k]) x *= 12.0;
    } else if (shape == 3) {  // offset from the origin so cosines are mostly positive
        for (auto& r : rows) r[rng() % dim] += 1.5;
    }
    return rows;
}

// Points near a circle, so Rips complexes carry one-dimensional holes.
std::vector<std::vector<double>> noisy_circle(std::mt19937_64& rng, std::size_t k, std::size_t dim) {
    std::normal_distribution<double> noise(0.0, 0.08);
    std::vector<std::vector<double>> rows(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        const double t = 2.0 * std::acos(-1.0) * static_cast<double>(i) / static_cast<double>(k);
        rows[i][0] = std::cos(t);
        rows[i][1] = std::sin(t);
        for (auto& x : rows[i]) x += noise(rng);
    }
    return rows;
}

PointCloud as_cloud(const std::vector<std::vector<double>>& rows) { return PointCloud::from_rows(rows); }

// --------------------------------------------------------------------------

Outcome feature_oracle() {
    std::mt19937_64 rng(20240601);
    const FeatureWeights w;
    double worst = 0.0;
    int feature_worst = -1;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng() % 7, dim = 2 + rng() % 31;
        const auto rows = mixed_cloud(rng, k, dim);
        const auto got = topo_profile(as_cloud(rows), w, static_cast<std::uint64_t>(trial)).raw();
        const auto expect = oracle::features(rows, w.w);
        for (std::size_t i = 0; i < 8; ++i) {
            const double err = std::fabs(got[i] - expect.values[i]);
            if (err > worst) {
                worst = err;
                feature_worst = static_cast<int>(i);
            }
        }
    }
    std::string detail = "200 clouds, max |err| " + fmt("%.2e", worst);
    if (feature_worst >= 0 && worst > 1e-9) detail += " on " + std::string(kTopoFeatureNames[feature_worst]);
    return {worst <= 1e-9, detail};
}

Outcome risk_contract() {
    std::mt19937_64 rng(77);
    const FeatureWeights w;
    double sum = 0.0;
    for (double x : w.w) sum += x;
    const bool weights_ok = std::fabs(sum - 1.0) <= 1e-9;
    bool in_range = true, flags_ok = true;
    std::size_t clamps = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t k = 2 + rng() % 7, dim = 2 + rng() % 15;
        const auto p = topo_profile(as_cloud(mixed_cloud(rng, k, dim)), w, static_cast<std::uint64_t>(trial));
        in_range = in_range && p.risk >= 0.0 && p.risk <= 1.0;
        const auto raw = p.raw();
        for (std::size_t i = 0; i < 8; ++i) {
            flags_ok = flags_ok && p.clamped[i] == (raw[i] < 0.0 || raw[i] > 1.0);
            clamps += p.clamped[i] ? 1 : 0;
        }
    }
    return {weights_ok && in_range && flags_ok && clamps > 0,
            "10000 clouds, weight sum " + fmt("%.12f", sum) + ", " + std::to_string(clamps) + " clamp flags recorded"};
}

Outcome homology_oracles() {
    std::mt19937_64 rng(5150);
    std::size_t h0_bad = 0, h1_bad = 0, h1_bars = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 2 + rng() % 7;
        const auto s = distance_summary(as_cloud(mixed_cloud(rng, k, 2 + rng() % 6)));
        std::vector<double> deaths;
        for (const auto& b : h0_barcode(s).bars)
            if (std::isfinite(b.death)) deaths.push_back(b.death);
        std::sort(deaths.begin(), deaths.end());
        if (deaths != oracle::single_linkage_heights([&](auto i, auto j) { return s.distance(i, j); }, k)) ++h0_bad;
    }
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 3 + rng() % 5;
        const std::size_t dim = 2 + rng() % 2;
        const auto rows = trial % 2 ? noisy_circle(rng, k + 1, dim) : fixture::random_rows(rng, k, dim);
        const auto s = distance_summary(as_cloud(rows));
        const std::size_t n = rows.size();
        std::vector<std::pair<double, double>> got, expect;
        for (const auto& b : h1_barcode(s).bars) got.emplace_back(b.birth, b.death);
        for (const auto& b : oracle::h1_bars([&](auto i, auto j) { return s.distance(i, j); }, n))
            expect.emplace_back(b.birth, b.death);
        std::sort(got.begin(), got.end());
        std::sort(expect.begin(), expect.end());
        h1_bars += got.size();
        if (got != expect) ++h1_bad;
    }
    const auto square = h1_barcode(distance_summary(as_cloud(fixture::unit_square())));
    const bool square_ok = square.bars.size() == 1 && std::fabs(square.bars[0].birth - 1.0) <= 1e-12 &&
                           std::fabs(square.bars[0].death - std::sqrt(2.0)) <= 1e-12;
    return {h0_bad == 0 && h1_bad == 0 && square_ok,
            "H0 mismatches " + std::to_string(h0_bad) + "/100, H1 mismatches " + std::to_string(h1_bad) + "/50 (" +
                std::to_string(h1_bars) + " bars), square " + (square_ok ? "(1, sqrt 2)" : "wrong")};
}

Outcome dirichlet_identities() {
    std::mt19937_64 rng(4);
    double min_alpha = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng() % 6, n = 1 + rng() % 5;
        auto p = HeadParameters::random(k, n, static_cast<std::uint64_t>(trial));
        auto flat = p.flat();
        const double blow = trial % 4 == 0 ? 200.0 : 1.0;
        for (auto& v : flat) v *= blow;
        p.assign_flat(flat);
        std::vector<TrajectoryStats> stats(k);
        std::uniform_real_distribution<double> u(0.0, 0.25);
        for (auto& s : stats) s = {u(rng), 4.0 * u(rng)};
        for (double a : head_forward(p, stats)) min_alpha = std::min(min_alpha, a);
    }
    const std::vector<double> fixture_alpha = {1.5, 1.5};
    const double ec = entropy_confidence(fixture_alpha);
    const double cd = dirichlet_confidence(fixture_alpha);
    double sym_err = 0.0;
    for (std::size_t n = 1; n <= 10; ++n)
        for (double c : {1.01, 2.0, 7.5, 100.0})
            sym_err = std::max(sym_err, std::fabs(dirichlet_features(std::vector<double>(n, c)).expected_max - 1.0 / n));
    const std::vector<double> alpha = {4.0, 2.5, 1.5};
    const auto f = dirichlet_features(alpha);
    const auto mc = oracle::dirichlet_component_moments(alpha, 0, 1000000, 99);
    const double z = std::fabs(mc.variance - f.top_class_variance) / mc.variance_se;
    const bool ok = min_alpha > 1.0 && std::fabs(ec - 0.3607) <= 1e-3 && std::fabs(cd - 0.5306) <= 1e-3 &&
                    sym_err <= 1e-12 && z <= 3.0;
    return {ok, "min alpha " + fmt("%.6f", min_alpha) + ", entropy_conf " + fmt("%.4f", ec) + ", conf_dir " +
                    fmt("%.4f", cd) + ", symmetric err " + fmt("%.1e", sym_err) + ", MC variance z " + fmt("%.2f", z)};
}

Outcome gradient_check() {
    std::mt19937_64 rng(2718);
    double worst = 0.0;
    std::size_t checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 2 + rng() % 4, n = 1 + rng() % 5;
        auto params = HeadParameters::random(k, n, 500 + static_cast<std::uint64_t>(trial));
        HeadExample ex;
        std::uniform_real_distribution<double> u(0.0, 0.25);
        for (std::size_t i = 0; i < k; ++i) ex.stats.push_back({u(rng), 2.0 * u(rng)});
        ex.n_components = 1 + rng() % n;
        if (rng() % 4) ex.target = rng() % ex.n_components;

        HeadParameters grad;
        head_loss_and_gradient(params, ex, &grad);
        const auto analytic = grad.flat();
        auto theta = params.flat();
        const double eps = 1e-5;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta[i];
            theta[i] = saved + eps;
            params.assign_flat(theta);
            const double up = head_loss_and_gradient(params, ex, nullptr);
            theta[i] = saved - eps;
            params.assign_flat(theta);
            const double down = head_loss_and_gradient(params, ex, nullptr);
            theta[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double rel = std::fabs(analytic[i] - numeric) /
                               std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-7});
            worst = std::max(worst, rel);
            ++checked;
        }
        params.assign_flat(theta);
    }
    return {worst < 1e-4, "20 instances, " + std::to_string(checked) + " partials, max rel err " + fmt("%.2e", worst)};
}

Outcome calibration_soundness() {
    std::mt19937_64 rng(10000);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ScoredPrediction> preds;
    for (int i = 0; i < 10000; ++i) {
        const double c = u(rng);
        preds.push_back({"q" + std::to_string(i), c, u(rng) < c});
    }
    const double e = ece(preds);
    const std::vector<ScoredPrediction> one = {{"a", 0.7, true}};
    const double b = brier(one);
    const auto bins = reliability_bins(preds);
    const double from_bins = ece_from_bins(bins);
    const double from_csv = ece_from_bins(parse_reliability_csv(reliability_csv(bins)));
    const bool ok = e < 0.02 && std::fabs(b - 0.09) <= 1e-12 && std::fabs(from_bins - e) <= 1e-12 &&
                    std::fabs(from_csv - e) <= 1e-12;
    return {ok, "calibrated ECE " + fmt("%.4f", e) + ", Brier(0.7 correct) " + fmt("%.17g", b) +
                    ", |ECE(bins) - ECE| " + fmt("%.1e", std::fabs(from_bins - e)) + ", via CSV " +
                    fmt("%.1e", std::fabs(from_csv - e))};
}

// Runs the command-line front end in-process with its stdout discarded.
int cli(std::vector<std::string> args) {
    std::cout.flush();
    std::fflush(stdout);
    const int saved = ::dup(STDOUT_FILENO);
    const int sink = ::open("/dev/null", O_WRONLY);
    ::dup2(sink, STDOUT_FILENO);
    ::close(sink);
    const int code = cli::run(args);
    std::cout.flush();
    std::fflush(stdout);
    ::dup2(saved, STDOUT_FILENO);
    ::close(saved);
    return code;
}

json standard_spec() {
    return {{"n_samples", 200},         {"k", 5},           {"dim", 16},
            {"sigma_tight", 0.01},      {"sigma_wide", 1.0}, {"center_separation", 5.0},
            {"confident_fraction", 0.5}};
}

std::vector<std::pair<std::string, double>> read_scores(const fs::path& p) {
    std::vector<std::pair<std::string, double>> out;
    std::istringstream in(read_file(p));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = json::parse(line);
        out.emplace_back(j.at("query_id").get<std::string>(), j.at("confidence").get<double>());
    }
    return out;
}

Outcome end_to_end(const fixture::TempDir& dir) {
    write_file_atomic(dir / "spec.json", standard_spec().dump());
    const std::string sim = (dir / "sim").string(), data = (dir / "sim" / "dataset.jsonl").string();
    if (cli({"simulate", "--spec", (dir / "spec.json").string(), "--seed", "42", "--out", sim}) != 0)
        return {false, "simulate failed"};
    if (cli({"score", "--dataset", data, "--seed", "42", "--out", (dir / "before").string()}) != 0)
        return {false, "pre-fit score failed"};
    if (cli({"fit", "--dataset", data, "--seed", "42", "--out", (dir / "fit").string()}) != 0)
        return {false, "fit failed"};
    if (cli({"score", "--dataset", data, "--seed", "42", "--head", (dir / "fit" / "head.json").string(), "--fusion",
             (dir / "fit" / "fusion.json").string(), "--out", (dir / "after").string()}) != 0)
        return {false, "post-fit score failed"};
    for (const char* stage : {"before", "after"}) {
        if (cli({"evaluate", "--dataset", data, "--seed", "42", "--subset", "test", "--scores",
                 (dir / stage / "scores.jsonl").string(), "--out", (dir / stage).string()}) != 0)
            return {false, std::string("evaluate failed for ") + stage};
    }

    const auto ds = load_dataset(data, {}).dataset;
    std::map<std::string, bool> confident;
    for (const auto& s : ds.samples) confident[s.query_id] = *s.correct;
    auto gap = [&](const fs::path& scores) {
        double c = 0.0, u = 0.0;
        std::size_t nc = 0, nu = 0;
        for (const auto& [id, v] : read_scores(scores)) {
            if (confident.at(id)) {
                c += v;
                ++nc;
            } else {
                u += v;
                ++nu;
            }
        }
        return c / static_cast<double>(nc) - u / static_cast<double>(nu);
    };
    const double gap_before = gap(dir / "before" / "scores.jsonl");
    const double gap_after = gap(dir / "after" / "scores.jsonl");
    const double ece_before = json::parse(read_file(dir / "before" / "report.json")).at("ece").get<double>();
    const double ece_after = json::parse(read_file(dir / "after" / "report.json")).at("ece").get<double>();
    const bool ok = gap_before > 0.1 && gap_after > 0.1 && ece_after < ece_before;
    return {ok, "confidence gap fixed " + fmt("%.3f", gap_before) + " / trained " + fmt("%.3f", gap_after) +
                    ", held-out ECE " + fmt("%.4f", ece_before) + " -> " + fmt("%.4f", ece_after)};
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& diff) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
    std::size_t count_b = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++count_b;
    if (names.size() != count_b) {
        diff = "file sets differ";
        return false;
    }
    for (const auto& n : names) {
        if (!fs::exists(b / n) || read_file(a / n) != read_file(b / n)) {
            diff = n;
            return false;
        }
    }
    return true;
}

Outcome determinism(const fixture::TempDir& dir) {
    write_file_atomic(dir / "spec.json", standard_spec().dump());
    const std::string spec = (dir / "spec.json").string();
    std::vector<std::string> compared;
    for (const char* run : {"r1", "r2"}) {
        const fs::path root = dir / run;
        const std::string data = (dir / "r1" / "sim" / "dataset.jsonl").string();
        if (cli({"simulate", "--spec", spec, "--seed", "7", "--out", (root / "sim").string()}) != 0)
            return {false, "simulate failed"};
        if (cli({"fit", "--dataset", data, "--seed", "7", "--out", (root / "fit").string()}) != 0)
            return {false, "fit failed"};
        if (cli({"score", "--dataset", data, "--seed", "7", "--head", (dir / "r1" / "fit" / "head.json").string(),
                 "--fusion", (dir / "r1" / "fit" / "fusion.json").string(), "--diagnostics", "--out",
                 (root / "score").string()}) != 0)
            return {false, "score failed"};
    }
    std::size_t files = 0;
    for (const char* stage : {"sim", "fit", "score"}) {
        std::string diff;
        if (!same_tree(dir / "r1" / stage, dir / "r2" / stage, diff)) return {false, std::string(stage) + ": " + diff};
        for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "r1" / stage)) ++files;
    }
    return {true, "simulate, fit, score: " + std::to_string(files) + " output files byte-identical across two runs"};
}

Outcome composite_transparency(const fixture::TempDir& dir) {
    const double value = composite(0.550, 0.572, 0.306, 0.221);
    // A report produced by the evaluate command carries the formula name and note.
    write_file_atomic(dir / "spec.json", json{{"n_samples", 20}}.dump());
    if (cli({"simulate", "--spec", (dir / "spec.json").string(), "--out", (dir / "sim").string()}) != 0)
        return {false, "simulate failed"};
    const auto data = (dir / "sim" / "dataset.jsonl").string();
    if (cli({"score", "--dataset", data, "--out", (dir / "s").string()}) != 0) return {false, "score failed"};
    if (cli({"evaluate", "--dataset", data, "--scores", (dir / "s" / "scores.jsonl").string(), "--out",
             (dir / "s").string()}) != 0)
        return {false, "evaluate failed"};
    const auto meta = json::parse(read_file(dir / "s" / "report.json")).at("metadata");
    const auto name = meta.at("composite_formula").get<std::string>();
    const auto note = meta.at("composite_note").get<std::string>();
    const bool ok = std::fabs(value - 0.649) < 5e-4 && name == default_composite().name &&
                    note.find("0.662") != std::string::npos && note.find("0.649") != std::string::npos;
    return {ok, "mean4(0.550, 0.572, 0.306, 0.221) = " + fmt("%.4f", value) + ", report names '" + name + "'"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "feature-oracle equivalence", 10.0, feature_oracle},
        {2, "risk contract", 30.0, risk_contract},
        {3, "homology oracles", 60.0, homology_oracles},
        {4, "Dirichlet identities", 0.0, dirichlet_identities},
        {5, "head gradient check", 10.0, gradient_check},
        {6, "calibration-metric soundness", 0.0, calibration_soundness},
        {7, "end-to-end ordering", 120.0, [&] { return end_to_end(fixture::TempDir("e2e")); }},
        {8, "determinism", 0.0, [&] { return determinism(fixture::TempDir("determinism")); }},
        {9, "composite-formula transparency", 0.0, [&] { return composite_transparency(fixture::TempDir("composite")); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) {
            o.pass = false;
            o.detail += "; over the " + fmt("%.0f", c.budget_s) + " s budget";
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s  [%d] %-31s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
