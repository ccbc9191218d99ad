#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace srp {

using EmbeddingVector = std::vector<double>;

// Text encoder. Implementations return L2-normalized vectors of dimension()
// entries, and embedding the same text twice yields identical vectors.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::size_t dimension() const noexcept = 0;
    // Identifies the encoder configuration; persisted next to stored vectors.
    virtual std::string fingerprint() const = 0;

    // One vector per text, order-preserving. Empty input is an ArgumentError.
    virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const = 0;

    EmbeddingVector embed_one(const std::string& text) const;
};

// Seeded feature-hashing encoder over word unigrams and character trigrams.
// Offline and deterministic; meant for tests and toy graphs.
class HashingEmbedder final : public EmbeddingProvider {
public:
    explicit HashingEmbedder(std::size_t dimension = 64, std::uint64_t seed = 0);

    std::size_t dimension() const noexcept override { return dimension_; }
    std::string fingerprint() const override;
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;

private:
    std::size_t dimension_;
    std::uint64_t seed_;
};

struct RemoteEmbedderConfig {
    std::string endpoint;  // POST {texts:[...]} -> {vectors:[[...]]}
    std::size_t dimension = 384;
    std::string model = "all-MiniLM-L6-v2";
    int max_retries = 2;
    std::chrono::milliseconds timeout{30000};
    std::chrono::milliseconds backoff{200};
};

class RemoteEmbedder final : public EmbeddingProvider {
public:
    explicit RemoteEmbedder(RemoteEmbedderConfig config);

    std::size_t dimension() const noexcept override { return config_.dimension; }
    std::string fingerprint() const override;
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;

private:
    RemoteEmbedderConfig config_;
};

double dot(std::span<const double> a, std::span<const double> b);
void l2_normalize(EmbeddingVector& v);

struct Neighbor {
    std::size_t index = 0;
    double score = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Exact cosine KNN: min(k, |corpus|) hits, descending score, ties by index.
std::vector<Neighbor> cosine_knn(std::span<const double> query,
                                 std::span<const EmbeddingVector> corpus, std::size_t k);

struct KMeansResult {
    std::vector<std::size_t> assignments;
    std::vector<EmbeddingVector> centroids;
    std::vector<double> inertia_log;  // after each assignment step
    std::size_t iterations = 0;

    double inertia() const { return inertia_log.empty() ? 0.0 : inertia_log.back(); }
};

// Lloyd's algorithm with k-means++ seeding. Stops when assignments stop
// changing or after max_iterations.
KMeansResult kmeans(std::span<const EmbeddingVector> vectors, std::size_t n_clusters,
                    std::uint64_t seed, std::size_t max_iterations = 100);

double inertia(std::span<const EmbeddingVector> vectors,
               std::span<const std::size_t> assignments,
               std::span<const EmbeddingVector> centroids);

}  // namespace srp
