#include <httplib.h>

#include <thread>

#include "edtr/error.hpp"
#include "edtr/hash.hpp"
#include "edtr/atomic_file.hpp"
#include "edtr/ingest.hpp"

namespace edtr {

using nlohmann::json;

namespace {

std::vector<std::vector<double>> parse_vectors(const std::string& body, std::size_t expected) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(Errc::BadResponseShape, std::string("response is not JSON: ") + e.what());
    }
    const auto it = j.find("vectors");
    if (it == j.end() || !it->is_array()) throw Error(Errc::BadResponseShape, "missing \"vectors\" array");
    if (it->size() != expected) {
        throw Error(Errc::BadResponseShape,
                    "expected " + std::to_string(expected) + " vectors, got " + std::to_string(it->size()));
    }
    std::vector<std::vector<double>> out;
    out.reserve(expected);
    std::optional<std::size_t> dim;
    for (const auto& v : *it) {
        if (!v.is_array() || v.empty()) throw Error(Errc::BadResponseShape, "vector entry is not a non-empty array");
        auto vec = v.get<std::vector<double>>();
        if (dim && vec.size() != *dim) throw Error(Errc::BadResponseShape, "ragged vectors in response");
        dim = vec.size();
        out.push_back(std::move(vec));
    }
    return out;
}

bool transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

HttpEmbeddingSource::HttpEmbeddingSource(std::string url, RetryPolicy retry) : retry_(retry) {
    if (url.find("://") == std::string::npos) url = "http://" + url;
    const auto host_start = url.find("://") + 3;
    const auto slash = url.find('/', host_start);
    base_ = url.substr(0, slash);
    path_ = slash == std::string::npos ? std::string("/") : url.substr(slash);
    if (host_start >= base_.size()) throw Error(Errc::InvalidConfig, "embedding endpoint has no host: " + url);
}

std::vector<std::vector<double>> HttpEmbeddingSource::fetch(std::span<const std::string> texts) {
    if (texts.empty()) return {};
    httplib::Client client(base_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(retry_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(retry_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());

    const std::string body = json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}}.dump();
    auto backoff = retry_.initial_backoff;
    std::string last_error;
    for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<std::chrono::milliseconds::rep>(static_cast<double>(backoff.count()) * retry_.multiplier));
        }
        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (transient_status(res->status)) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw Error(Errc::EndpointUnreachable, base_ + path_ + " answered HTTP " + std::to_string(res->status));
        }
        return parse_vectors(res->body, texts.size());
    }
    throw Error(Errc::EndpointUnreachable, base_ + path_ + " failed after " +
                                               std::to_string(retry_.max_retries + 1) + " attempts: " + last_error);
}

FileEmbeddingSource::FileEmbeddingSource(const std::filesystem::path& path) {
    try {
        table_ = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(Errc::BadResponseShape, path.string() + ": " + e.what());
    }
    if (!table_.is_object()) throw Error(Errc::BadResponseShape, path.string() + ": expected a JSON object");
}

std::vector<std::vector<double>> FileEmbeddingSource::fetch(std::span<const std::string> texts) {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        const auto key = sha256_hex(text);
        const auto it = table_.find(key);
        if (it == table_.end()) throw Error(Errc::MissingPrecomputedVector, key);
        if (!it->is_array()) throw Error(Errc::BadResponseShape, key + ": not an array");
        out.push_back(it->get<std::vector<double>>());
    }
    return out;
}

std::unique_ptr<EmbeddingSource> make_embedding_source(std::string_view descriptor, RetryPolicy retry) {
    if (descriptor.starts_with("http:")) {
        return std::make_unique<HttpEmbeddingSource>(std::string(descriptor.substr(5)), retry);
    }
    if (descriptor.starts_with("file:")) {
        return std::make_unique<FileEmbeddingSource>(std::filesystem::path(std::string(descriptor.substr(5))));
    }
    throw Error(Errc::InvalidConfig, "embedding endpoint must start with http: or file:, got " + std::string(descriptor));
}

std::vector<std::vector<double>> fetch_embeddings(std::span<const std::string> texts, EmbeddingSource& source) {
    if (texts.empty()) throw Error(Errc::InvalidArgument, "no texts to embed");
    auto vectors = source.fetch(texts);
    if (vectors.size() != texts.size()) {
        throw Error(Errc::BadResponseShape,
                    "expected " + std::to_string(texts.size()) + " vectors, got " + std::to_string(vectors.size()));
    }
    return vectors;
}

std::size_t fill_missing_embeddings(Dataset& dataset, EmbeddingSource& source) {
    std::vector<std::string> texts;
    std::vector<TrajectoryRecord*> targets;
    for (auto& s : dataset.samples) {
        for (auto& t : s.trajectories) {
            if (t.embedding.empty()) {
                texts.push_back(t.text);
                targets.push_back(&t);
            }
        }
    }
    if (texts.empty()) return 0;
    auto vectors = fetch_embeddings(texts, source);
    if (dataset.embedding_dim == 0) dataset.embedding_dim = vectors.front().size();
    if (dataset.embedding_dim == 0) throw Error(Errc::DimensionMismatch, "fetched embeddings are empty");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (vectors[i].size() != dataset.embedding_dim) {
            throw Error(Errc::DimensionMismatch, "fetched embedding has dimension " + std::to_string(vectors[i].size()) +
                                                     ", dataset declares " + std::to_string(dataset.embedding_dim));
        }
        targets[i]->embedding = std::move(vectors[i]);
    }
    return targets.size();
}

}  // namespace edtr
