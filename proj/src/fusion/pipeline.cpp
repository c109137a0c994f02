#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "edtr/error.hpp"
#include "edtr/fusion.hpp"

namespace edtr {

namespace {

PointCloud cloud_of(const ReasoningSample& sample) {
    std::vector<std::vector<double>> rows;
    rows.reserve(sample.trajectories.size());
    for (const auto& t : sample.trajectories) rows.push_back(t.embedding);
    return PointCloud::from_rows(rows);
}

nlohmann::json topo_json(const TopoProfile& p) {
    nlohmann::json features = nlohmann::json::object();
    nlohmann::json clamped = nlohmann::json::array();
    const auto raw = p.raw();
    for (std::size_t i = 0; i < kTopoFeatureCount; ++i) {
        features[std::string(kTopoFeatureNames[i])] = raw[i];
        if (p.clamped[i]) clamped.push_back(kTopoFeatureNames[i]);
    }
    return {{"features", std::move(features)}, {"risk_topo", p.risk}, {"clamped", std::move(clamped)}};
}

}  // namespace

ConfidenceReport score_sample(const ReasoningSample& sample, const HeadParameters& head,
                              const FusionParameters& fusion, const ScoreOptions& options) {
    try {
        if (sample.k() != head.k) {
            throw Error(Errc::IncompatibleParameters, "sample has k=" + std::to_string(sample.k()) +
                                                          ", head expects k=" + std::to_string(head.k));
        }
        ConfidenceReport r;
        r.query_id = sample.query_id;
        r.mode = fusion.mode;

        const auto cloud = cloud_of(sample);
        r.topo = topo_profile(cloud, options.weights, options.seed);
        r.risk_topo = r.topo.risk;
        r.conf_topo = 1.0 - r.topo.risk;

        const auto stats = sample_stats(sample, options.imputation);
        r.imputed_trajectories = stats.imputed;
        r.n_components = component_count(sample, head.n);
        const auto alpha = head_forward(head, stats.stats);
        r.dirichlet = dirichlet_profile(std::span<const double>(alpha.data(), r.n_components), options.entropy_form);
        r.conf_dir = r.dirichlet.conf_dir;
        r.features = fused_features(r.topo, r.dirichlet);

        if (fusion.mode == FusionMode::Trained) {
            if (!fusion.trained) throw Error(Errc::IncompatibleParameters, "trained fusion without coefficients");
            r.confidence = fusion.trained->predict(r.features);
        } else {
            r.confidence = fuse_fixed(r.risk_topo, r.conf_dir, fusion.fixed);
        }

        if (options.diagnostics) {
            const auto summary = distance_summary(cloud);
            HomologyDiagnostics d;
            d.h0 = h0_barcode(summary);
            d.h1 = h1_barcode(summary, options.h1_cap);
            d.stats = persistence_stats(d.h0, d.h1);
            r.diagnostics = std::move(d);
        }
        return r;
    } catch (const Error& e) {
        throw Error(e.code(), sample.query_id + ": " + e.detail());
    }
}

std::vector<ConfidenceReport> score_samples(std::span<const ReasoningSample> samples, const HeadParameters& head,
                                            const FusionParameters& fusion, const ScoreOptions& options,
                                            std::size_t jobs) {
    std::vector<ConfidenceReport> out(samples.size());
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(samples.size(), 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < samples.size(); ++i) out[i] = score_sample(samples[i], head, fusion, options);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_at = samples.size();
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < samples.size(); i = next++) {
                    try {
                        out[i] = score_sample(samples[i], head, fusion, options);
                    } catch (...) {
                        // report the lowest failing index so errors are schedule-independent
                        std::lock_guard lock(failure_mutex);
                        if (i < failed_at) {
                            failed_at = i;
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

nlohmann::json report_to_json(const ConfidenceReport& r) {
    nlohmann::json j = {
        {"query_id", r.query_id},
        {"confidence", r.confidence},
        {"conf_topo", r.conf_topo},
        {"risk_topo", r.risk_topo},
        {"conf_dir", r.conf_dir},
        {"fusion_mode", to_string(r.mode)},
        {"topo", topo_json(r.topo)},
        {"dirichlet",
         {{"alpha", r.dirichlet.alpha},
          {"concentration", r.dirichlet.features.concentration},
          {"diff_entropy", r.dirichlet.features.diff_entropy},
          {"expected_max", r.dirichlet.features.expected_max},
          {"top_class_variance", r.dirichlet.features.top_class_variance},
          {"entropy_conf", r.dirichlet.entropy_conf},
          {"n_components", r.n_components}}},
        {"flags",
         {{"imputed_trajectories", r.imputed_trajectories}, {"imputed", r.imputed_trajectories > 0}}},
    };
    if (r.diagnostics) {
        j["homology"] = {
            {"h0", barcode_to_json(r.diagnostics->h0)},
            {"h1", barcode_to_json(r.diagnostics->h1)},
            {"stats", persistence_stats_to_json(r.diagnostics->stats)},
        };
    }
    return j;
}

}  // namespace edtr
