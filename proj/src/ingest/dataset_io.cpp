#include <cmath>
#include <set>
#include <sstream>

#include "edtr/atomic_file.hpp"
#include "edtr/error.hpp"
#include "edtr/ingest.hpp"

namespace edtr {

using nlohmann::json;

namespace {

std::optional<std::vector<double>> optional_array(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::vector<double>>();
}

}  // namespace

ReasoningSample sample_from_json(const json& j) {
    ReasoningSample s;
    s.query_id = j.at("query_id").get<std::string>();
    s.question = j.value("question", std::string{});
    if (const auto it = j.find("gold_answer"); it != j.end() && !it->is_null()) {
        s.gold_answer = normalize_answer(it->get<std::string>());
    }
    if (const auto it = j.find("split"); it != j.end() && !it->is_null()) {
        s.split = it->get<std::string>();
    }
    for (const auto& t : j.at("trajectories")) {
        TrajectoryRecord r;
        r.text = t.value("text", std::string{});
        r.answer = normalize_answer(t.at("answer").get<std::string>());
        if (const auto it = t.find("embedding"); it != t.end() && !it->is_null()) {
            r.embedding = it->get<std::vector<double>>();
        }
        r.token_probs = optional_array(t, "token_probs");
        r.token_entropies = optional_array(t, "token_entropies");
        s.trajectories.push_back(std::move(r));
    }
    finalize_sample(s);
    return s;
}

json sample_to_json(const ReasoningSample& s) {
    json trajectories = json::array();
    for (const auto& t : s.trajectories) {
        trajectories.push_back({
            {"text", t.text},
            {"answer", t.answer},
            {"embedding", t.embedding},
            {"token_probs", t.token_probs ? json(*t.token_probs) : json(nullptr)},
            {"token_entropies", t.token_entropies ? json(*t.token_entropies) : json(nullptr)},
        });
    }
    json j = {
        {"query_id", s.query_id},
        {"question", s.question},
        {"gold_answer", s.gold_answer ? json(*s.gold_answer) : json(nullptr)},
        {"trajectories", std::move(trajectories)},
    };
    if (s.split) j["split"] = *s.split;
    return j;
}

void validate_sample(const ReasoningSample& s, std::size_t embedding_dim, bool allow_missing_embeddings) {
    if (s.query_id.empty()) throw Error(Errc::InvalidArgument, "empty query_id");
    if (s.trajectories.size() < 2) {
        throw Error(Errc::InvalidArgument, s.query_id + ": need at least 2 trajectories");
    }
    for (const auto& t : s.trajectories) {
        if (t.embedding.empty() && allow_missing_embeddings) continue;
        if (t.embedding.size() != embedding_dim) {
            throw Error(Errc::DimensionMismatch, s.query_id + ": expected " + std::to_string(embedding_dim) +
                                                     ", got " + std::to_string(t.embedding.size()));
        }
        for (double v : t.embedding) {
            if (!std::isfinite(v)) throw Error(Errc::NonFiniteInput, s.query_id + ": non-finite embedding");
        }
        if (t.token_probs) {
            for (double p : *t.token_probs) {
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw Error(Errc::InvalidArgument, s.query_id + ": token probability outside [0,1]");
                }
            }
        }
        if (t.token_entropies) {
            for (double h : *t.token_entropies) {
                if (!(h >= 0.0) || !std::isfinite(h)) {
                    throw Error(Errc::InvalidArgument, s.query_id + ": negative token entropy");
                }
            }
        }
    }
}

LoadResult parse_dataset(std::string_view contents, const LoadOptions& options) {
    LoadResult result;
    result.dataset.modality_tag = options.modality_tag;
    std::optional<std::size_t> dim = options.embedding_dim;
    std::set<std::string> seen;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < contents.size()) {
        auto nl = contents.find('\n', pos);
        if (nl == std::string_view::npos) nl = contents.size();
        const std::string_view line = contents.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        try {
            ReasoningSample sample;
            try {
                sample = sample_from_json(json::parse(line));
            } catch (const json::exception& e) {
                throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": " + e.what());
            }
            if (!dim) {
                for (const auto& t : sample.trajectories) {
                    if (!t.embedding.empty()) {
                        dim = t.embedding.size();
                        break;
                    }
                }
            }
            validate_sample(sample, dim.value_or(kDefaultEmbeddingDim), options.allow_missing_embeddings);
            if (!seen.insert(sample.query_id).second) {
                throw Error(Errc::DuplicateQueryId, sample.query_id);
            }
            result.dataset.samples.push_back(std::move(sample));
        } catch (const Error& e) {
            if (options.strict) {
                if (e.code() == Errc::MalformedLine) throw;
                throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.detail());
            }
            ++result.dropped_count;
            result.issues.push_back({line_no, e.what()});
        }
    }
    if (result.dataset.samples.empty()) throw Error(Errc::EmptyDataset, "no valid samples");
    // Every embedding missing leaves the dimension to whatever source fills them.
    result.dataset.embedding_dim = dim.value_or(0);
    return result;
}

LoadResult load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
    return parse_dataset(read_file(path), options);
}

std::string serialize_dataset(const Dataset& dataset) {
    std::string out;
    for (const auto& s : dataset.samples) {
        out += sample_to_json(s).dump();
        out += '\n';
    }
    return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_dataset(dataset));
}

}  // namespace edtr
