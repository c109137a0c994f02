#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace edtr {

inline constexpr std::size_t kDefaultEmbeddingDim = 384;

struct TrajectoryRecord {
    std::string text;
    std::string answer;  // normalized
    std::vector<double> embedding;
    std::optional<std::vector<double>> token_probs;
    std::optional<std::vector<double>> token_entropies;

    bool operator==(const TrajectoryRecord&) const = default;
};

struct ReasoningSample {
    std::string query_id;
    std::string question;
    std::vector<TrajectoryRecord> trajectories;
    std::optional<std::string> gold_answer;  // normalized
    std::string predicted_answer;
    std::optional<bool> correct;
    std::optional<std::string> split;  // optional named partition: train / calib / test

    std::size_t k() const { return trajectories.size(); }
    bool operator==(const ReasoningSample&) const = default;
};

struct Dataset {
    std::vector<ReasoningSample> samples;
    std::size_t embedding_dim = kDefaultEmbeddingDim;  // 0 when no embedding is known yet
    std::string modality_tag;
};

// ---------------------------------------------------------------------------
// Answers

/// Lowercases, trims surrounding whitespace, and canonicalizes numerals
/// ("1,000" -> "1000", "42.0" -> "42").
std::string normalize_answer(std::string_view raw);

/// Distinct answers ordered by vote count (descending), ties by first
/// occurrence. Element 0 is the predicted answer.
std::vector<std::string> ranked_answers(std::span<const TrajectoryRecord> trajectories);

std::string majority_answer(std::span<const TrajectoryRecord> trajectories);

/// Recomputes predicted_answer and correct from trajectories and gold_answer.
void finalize_sample(ReasoningSample& sample);

// ---------------------------------------------------------------------------
// JSON Lines dataset files

struct LoadOptions {
    bool strict = true;
    std::optional<std::size_t> embedding_dim;  // inferred from the first valid line when unset
    bool allow_missing_embeddings = false;     // embeddings to be fetched later
    std::string modality_tag;
};

struct LoadIssue {
    std::size_t line_no;
    std::string message;
};

struct LoadResult {
    Dataset dataset;
    std::size_t dropped_count = 0;
    std::vector<LoadIssue> issues;
};

ReasoningSample sample_from_json(const nlohmann::json& j);
nlohmann::json sample_to_json(const ReasoningSample& sample);

/// Checks the per-sample invariants; throws edtr::Error on violation.
void validate_sample(const ReasoningSample& sample, std::size_t embedding_dim, bool allow_missing_embeddings = false);

LoadResult parse_dataset(std::string_view contents, const LoadOptions& options);
LoadResult load_dataset(const std::filesystem::path& path, const LoadOptions& options);
std::string serialize_dataset(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Embedding sources

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{100};
    double multiplier = 2.0;
    std::chrono::milliseconds timeout{10'000};
};

class EmbeddingSource {
public:
    virtual ~EmbeddingSource() = default;
    /// One vector per text, in input order.
    virtual std::vector<std::vector<double>> fetch(std::span<const std::string> texts) = 0;
};

/// POSTs {"texts": [...]} and expects {"vectors": [[...], ...]}.
class HttpEmbeddingSource final : public EmbeddingSource {
public:
    HttpEmbeddingSource(std::string url, RetryPolicy retry = {});
    std::vector<std::vector<double>> fetch(std::span<const std::string> texts) override;

private:
    std::string base_;  // scheme://host[:port]
    std::string path_;
    RetryPolicy retry_;
};

/// Precomputed vectors in a JSON object keyed by sha256_hex(text).
class FileEmbeddingSource final : public EmbeddingSource {
public:
    explicit FileEmbeddingSource(const std::filesystem::path& path);
    std::vector<std::vector<double>> fetch(std::span<const std::string> texts) override;

private:
    nlohmann::json table_;
};

/// Descriptor is "http:<url>" or "file:<path>".
std::unique_ptr<EmbeddingSource> make_embedding_source(std::string_view descriptor, RetryPolicy retry = {});

std::vector<std::vector<double>> fetch_embeddings(std::span<const std::string> texts, EmbeddingSource& source);

/// Fills every empty trajectory embedding in the dataset from `source`.
std::size_t fill_missing_embeddings(Dataset& dataset, EmbeddingSource& source);

// ---------------------------------------------------------------------------
// Synthetic datasets

struct GeneratorSpec {
    std::size_t n_samples = 200;
    std::size_t k = 5;
    std::size_t dim = 16;
    double sigma_tight = 0.01;
    double sigma_wide = 1.0;
    double center_separation = 5.0;
    double center_norm = 3.0;
    std::size_t uncertain_components = 2;
    double confident_fraction = 0.5;
    std::size_t n_tokens = 32;
    std::string modality_tag = "synthetic";
};

GeneratorSpec generator_spec_from_json(const nlohmann::json& j);
nlohmann::json generator_spec_to_json(const GeneratorSpec& spec);

/// "Confident" samples: one tight Gaussian, unanimous gold answer, peaked
/// token probabilities. "Uncertain" samples: a mixture of separated wide
/// Gaussians with a wrong answer per component and flat token probabilities.
Dataset synth_dataset(const GeneratorSpec& spec, std::uint64_t seed);

}  // namespace edtr
