#include "srp/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "http_util.hpp"
#include "json.hpp"
#include "srp/error.hpp"

namespace srp {

EmbeddingVector EmbeddingProvider::embed_one(const std::string& text) const {
    std::string texts[] = {text};
    return embed(texts).front();
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ArgumentError("dimension mismatch in dot product");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

void l2_normalize(EmbeddingVector& v) {
    double norm = std::sqrt(dot(v, v));
    if (norm == 0.0) return;
    for (auto& x : v) x /= norm;
}

namespace {

std::uint64_t fnv1a(std::uint64_t seed, std::string_view text) {
    std::uint64_t h = 1469598103934665603ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Lowercased runs of alphanumerics; bytes >= 0x80 count as word characters so
// UTF-8 text keeps its words intact.
std::vector<std::string> words_of(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

}  // namespace

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
    if (dimension == 0) throw ArgumentError("embedding dimension must be positive");
}

std::string HashingEmbedder::fingerprint() const {
    return "hashing:dim=" + std::to_string(dimension_) + ":seed=" + std::to_string(seed_);
}

std::vector<EmbeddingVector> HashingEmbedder::embed(std::span<const std::string> texts) const {
    if (texts.empty()) throw ArgumentError("embed called with no texts");
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        EmbeddingVector v(dimension_, 0.0);
        auto add = [&](std::string_view feature, double weight) {
            auto h = fnv1a(seed_, feature);
            double sign = (mix(h) & 1U) ? -1.0 : 1.0;
            v[h % dimension_] += sign * weight;
        };
        for (const auto& word : words_of(text)) {
            add("w:" + word, 1.0);
            std::string padded = "#" + word + "#";
            for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
                add("c:" + padded.substr(i, 3), 0.5);
            }
        }
        if (dot(v, v) == 0.0) add("<empty>", 1.0);
        l2_normalize(v);
        out.push_back(std::move(v));
    }
    return out;
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config) : config_(std::move(config)) {
    if (config_.dimension == 0) throw ArgumentError("embedding dimension must be positive");
    detail::split_url(config_.endpoint);
}

std::string RemoteEmbedder::fingerprint() const {
    return "remote:" + config_.model + ":dim=" + std::to_string(config_.dimension);
}

std::vector<EmbeddingVector> RemoteEmbedder::embed(std::span<const std::string> texts) const {
    using nlohmann::json;
    if (texts.empty()) throw ArgumentError("embed called with no texts");
    auto url = detail::split_url(config_.endpoint);
    const std::string body = json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}}.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(config_.backoff * (1 << (attempt - 1)));
        auto client = detail::make_client(url, config_.timeout);
        auto response = client->Post(url.path, body, "application/json");
        if (!response) {
            last_error = "request failed: " + httplib::to_string(response.error());
            continue;
        }
        if (response->status >= 500 || response->status == 429) {
            last_error = "HTTP " + std::to_string(response->status);
            continue;
        }
        if (response->status != 200) {
            throw ProviderError("embedding service returned HTTP " +
                                std::to_string(response->status));
        }
        json doc = json::parse(response->body, nullptr, false);
        if (doc.is_discarded() || !doc.contains("vectors") || !doc["vectors"].is_array()) {
            throw ProviderError("embedding service returned malformed JSON");
        }
        const auto& rows = doc["vectors"];
        if (rows.size() != texts.size()) {
            throw ProviderError("embedding service returned " + std::to_string(rows.size()) +
                                " vectors for " + std::to_string(texts.size()) + " texts");
        }
        std::vector<EmbeddingVector> out;
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != config_.dimension) {
                throw ProviderError("embedding has wrong dimension");
            }
            EmbeddingVector v;
            for (const auto& x : row) {
                if (!x.is_number() || !std::isfinite(x.get<double>())) {
                    throw ProviderError("embedding has a non-finite entry");
                }
                v.push_back(x.get<double>());
            }
            l2_normalize(v);
            out.push_back(std::move(v));
        }
        return out;
    }
    throw ProviderError("embedding service failed after retries: " + last_error);
}

std::vector<Neighbor> cosine_knn(std::span<const double> query,
                                 std::span<const EmbeddingVector> corpus, std::size_t k) {
    if (k == 0) throw ArgumentError("k must be positive");
    const double qn = std::sqrt(dot(query, query));
    std::vector<Neighbor> scored;
    scored.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].size() != query.size()) {
            throw ArgumentError("dimension mismatch: query has " + std::to_string(query.size()) +
                                ", corpus[" + std::to_string(i) + "] has " +
                                std::to_string(corpus[i].size()));
        }
        const double cn = std::sqrt(dot(corpus[i], corpus[i]));
        const double score = (qn == 0.0 || cn == 0.0) ? 0.0 : dot(query, corpus[i]) / (qn * cn);
        scored.push_back({i, score});
    }
    const auto take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), [](const Neighbor& a, const Neighbor& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.index < b.index;
                      });
    scored.resize(take);
    return scored;
}

namespace {

double squared_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

std::size_t nearest(const EmbeddingVector& x, const std::vector<EmbeddingVector>& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(x, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

double inertia(std::span<const EmbeddingVector> vectors, std::span<const std::size_t> assignments,
               std::span<const EmbeddingVector> centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        total += squared_distance(vectors[i], centroids[assignments[i]]);
    }
    return total;
}

KMeansResult kmeans(std::span<const EmbeddingVector> vectors, std::size_t n_clusters,
                    std::uint64_t seed, std::size_t max_iterations) {
    if (vectors.empty()) throw ArgumentError("kmeans needs at least one vector");
    if (n_clusters == 0) throw ArgumentError("n_clusters must be positive");
    if (n_clusters > vectors.size()) {
        throw ArgumentError("n_clusters (" + std::to_string(n_clusters) + ") exceeds the " +
                            std::to_string(vectors.size()) + " vectors");
    }
    const auto dim = vectors.front().size();
    for (const auto& v : vectors) {
        if (v.size() != dim) throw ArgumentError("kmeans vectors differ in dimension");
    }

    std::mt19937_64 rng(seed);
    const std::size_t n = vectors.size();

    // k-means++ seeding
    std::vector<EmbeddingVector> centroids;
    std::vector<bool> chosen(n, false);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    centroids.push_back(vectors[first]);
    chosen[first] = true;
    while (centroids.size() < n_clusters) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(vectors[i], centroids.back()));
            total += d2[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            double target = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (std::size_t i = 0; i < n; ++i) {
                if (d2[i] <= 0.0) continue;
                pick = i;
                target -= d2[i];
                if (target < 0.0) break;
            }
        }
        if (pick == n) {
            // Every point coincides with a centroid: pick uniformly among unchosen points.
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) rest.push_back(i);
            }
            pick = rest[std::uniform_int_distribution<std::size_t>(0, rest.size() - 1)(rng)];
        }
        chosen[pick] = true;
        centroids.push_back(vectors[pick]);
    }

    KMeansResult result;
    std::vector<std::size_t> assignments(n, 0);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        std::vector<std::size_t> next(n);
        for (std::size_t i = 0; i < n; ++i) next[i] = nearest(vectors[i], centroids);
        const bool stable = iter > 0 && next == assignments;
        assignments = std::move(next);
        result.inertia_log.push_back(inertia(vectors, assignments, centroids));
        result.iterations = iter + 1;
        if (stable) break;

        std::vector<EmbeddingVector> sums(n_clusters, EmbeddingVector(dim, 0.0));
        std::vector<std::size_t> counts(n_clusters, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[assignments[i]];
            for (std::size_t d = 0; d < dim; ++d) s[d] += vectors[i][d];
            ++counts[assignments[i]];
        }
        for (std::size_t c = 0; c < n_clusters; ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its centroid
            for (std::size_t d = 0; d < dim; ++d) {
                centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
            }
        }
    }
    result.assignments = std::move(assignments);
    result.centroids = std::move(centroids);
    return result;
}

}  // namespace srp
