#include <algorithm>
#include <cmath>
#include <random>

#include "edtr/error.hpp"
#include "edtr/ingest.hpp"

namespace edtr {

using nlohmann::json;

GeneratorSpec generator_spec_from_json(const json& j) {
    GeneratorSpec s;
    try {
        s.n_samples = j.value("n_samples", s.n_samples);
        s.k = j.value("k", s.k);
        s.dim = j.value("dim", s.dim);
        s.sigma_tight = j.value("sigma_tight", s.sigma_tight);
        s.sigma_wide = j.value("sigma_wide", s.sigma_wide);
        s.center_separation = j.value("center_separation", s.center_separation);
        s.center_norm = j.value("center_norm", s.center_norm);
        s.uncertain_components = j.value("uncertain_components", s.uncertain_components);
        s.confident_fraction = j.value("confident_fraction", s.confident_fraction);
        s.n_tokens = j.value("n_tokens", s.n_tokens);
        s.modality_tag = j.value("modality_tag", s.modality_tag);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidSpec, e.what());
    }
    return s;
}

json generator_spec_to_json(const GeneratorSpec& s) {
    return {
        {"n_samples", s.n_samples},
        {"k", s.k},
        {"dim", s.dim},
        {"sigma_tight", s.sigma_tight},
        {"sigma_wide", s.sigma_wide},
        {"center_separation", s.center_separation},
        {"center_norm", s.center_norm},
        {"uncertain_components", s.uncertain_components},
        {"confident_fraction", s.confident_fraction},
        {"n_tokens", s.n_tokens},
        {"modality_tag", s.modality_tag},
    };
}

namespace {

void check_spec(const GeneratorSpec& s) {
    if (s.n_samples == 0 || s.dim == 0 || s.n_tokens == 0) throw Error(Errc::InvalidSpec, "counts must be positive");
    if (s.k < 2) throw Error(Errc::InvalidSpec, "k must be at least 2");
    if (!(s.sigma_tight > 0.0) || !(s.sigma_wide > 0.0)) throw Error(Errc::InvalidSpec, "scales must be positive");
    if (!(s.center_separation > 0.0) || !(s.center_norm > 0.0)) {
        throw Error(Errc::InvalidSpec, "center geometry must be positive");
    }
    if (s.uncertain_components < 2 || s.uncertain_components > s.k) {
        throw Error(Errc::InvalidSpec, "uncertain_components must lie in [2, k]");
    }
    if (!(s.confident_fraction >= 0.0 && s.confident_fraction <= 1.0)) {
        throw Error(Errc::InvalidSpec, "confident_fraction must lie in [0, 1]");
    }
}

std::vector<double> random_direction(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(dim);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& x : v) {
            x = normal(rng);
            norm += x * x;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
}

std::vector<double> gaussian_point(const std::vector<double>& center, double sigma, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, sigma);
    std::vector<double> p(center.size());
    for (std::size_t d = 0; d < center.size(); ++d) p[d] = center[d] + normal(rng);
    return p;
}

}  // namespace

Dataset synth_dataset(const GeneratorSpec& spec, std::uint64_t seed) {
    check_spec(spec);
    std::mt19937_64 rng(seed);

    const auto n_confident =
        static_cast<std::size_t>(std::llround(spec.confident_fraction * static_cast<double>(spec.n_samples)));
    std::vector<bool> confident(spec.n_samples, false);
    std::fill_n(confident.begin(), n_confident, true);
    std::shuffle(confident.begin(), confident.end(), rng);

    Dataset ds;
    ds.embedding_dim = spec.dim;
    ds.modality_tag = spec.modality_tag;
    ds.samples.reserve(spec.n_samples);

    std::normal_distribution<double> unit_normal(0.0, 1.0);
    std::uniform_real_distribution<double> flat_prob(0.3, 1.0);

    for (std::size_t i = 0; i < spec.n_samples; ++i) {
        ReasoningSample s;
        char id[32];
        std::snprintf(id, sizeof id, "synth-%05zu", i);
        s.query_id = id;
        s.question = "synthetic question " + std::to_string(i);
        const long gold = 100 + static_cast<long>(i) * 7;
        s.gold_answer = std::to_string(gold);

        auto base = random_direction(spec.dim, rng);
        for (auto& x : base) x *= spec.center_norm;

        const bool tight = confident[i];
        std::vector<std::vector<double>> centers;
        if (tight) {
            centers.push_back(base);
        } else {
            const auto axis = random_direction(spec.dim, rng);
            for (std::size_t c = 0; c < spec.uncertain_components; ++c) {
                auto center = base;
                const double offset = spec.center_separation * static_cast<double>(c);
                for (std::size_t d = 0; d < spec.dim; ++d) center[d] += offset * axis[d];
                centers.push_back(std::move(center));
            }
        }

        for (std::size_t t = 0; t < spec.k; ++t) {
            TrajectoryRecord r;
            const std::size_t component = t % centers.size();
            r.embedding = gaussian_point(centers[component], tight ? spec.sigma_tight : spec.sigma_wide, rng);
            r.answer = tight ? std::to_string(gold) : std::to_string(gold + 1 + static_cast<long>(component));
            r.text = "synthetic reasoning " + std::to_string(i) + "." + std::to_string(t) + " => " + r.answer;
            std::vector<double> probs(spec.n_tokens);
            for (auto& p : probs) {
                p = tight ? std::clamp(0.97 + 0.02 * unit_normal(rng), 0.0, 1.0) : flat_prob(rng);
            }
            r.token_probs = std::move(probs);
            s.trajectories.push_back(std::move(r));
        }
        finalize_sample(s);
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

}  // namespace edtr
