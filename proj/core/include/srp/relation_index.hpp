#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "srp/embeddings.hpp"
#include "srp/types.hpp"

namespace srp {

// Lowercase tokens split on dots, underscores and any other non-alphanumeric byte.
std::vector<std::string> tokenize_relation(std::string_view relation);

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

// Searchable relation vocabulary. Immutable after construction.
class RelationCorpus {
public:
    RelationCorpus(std::vector<RelationId> relations, const EmbeddingProvider& provider,
                   Bm25Params params = {});

    const std::vector<RelationId>& relations() const noexcept { return relations_; }
    const std::vector<std::vector<std::string>>& tokens() const noexcept { return tokens_; }
    const std::vector<EmbeddingVector>& embeddings() const noexcept { return embeddings_; }
    const EmbeddingProvider& provider() const noexcept { return *provider_; }
    const Bm25Params& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return relations_.size(); }
    bool empty() const noexcept { return relations_.empty(); }

    std::size_t document_frequency(const std::string& token) const;
    double average_length() const noexcept { return avg_length_; }

private:
    std::vector<RelationId> relations_;
    std::vector<std::vector<std::string>> tokens_;
    std::vector<EmbeddingVector> embeddings_;
    std::unordered_map<std::string, std::size_t> df_;
    double avg_length_ = 0.0;
    const EmbeddingProvider* provider_;
    Bm25Params params_;
};

using RelationScores = std::vector<std::pair<RelationId, double>>;

// Okapi BM25 with idf = ln(1 + (N - df + 0.5) / (df + 0.5)). Repeated query
// tokens count once. Output follows corpus order.
RelationScores bm25_scores(const RelationCorpus& corpus, std::span<const std::string> query_tokens);

// Cosine of embed(query_text) against each relation embedding, corpus order.
RelationScores dense_scores(const RelationCorpus& corpus, const std::string& query_text);

// Min-max to [0,1]; a constant list maps to all zeros.
std::vector<double> min_max_normalize(std::span<const double> scores);

// lexical_weight * norm(lexical) + (1 - lexical_weight) * norm(dense).
std::vector<double> fuse_scores(std::span<const double> lexical, std::span<const double> dense,
                                double lexical_weight = 0.5);

// Top n relations by fused lexical + dense score; ties broken by relation id.
std::vector<ScoredRelation> hybrid_top_n(const RelationCorpus& corpus, const std::string& query,
                                         std::size_t n = 5, double lexical_weight = 0.5);

std::vector<RelationId> load_relation_vocabulary(const std::string& path);

}  // namespace srp
