#include "srp/relation_index.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_set>

#include "srp/error.hpp"
#include "text_util.hpp"

namespace srp {

std::vector<std::string> tokenize_relation(std::string_view relation) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : relation) {
        if (std::isalnum(c) || c >= 0x80) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

RelationCorpus::RelationCorpus(std::vector<RelationId> relations,
                               const EmbeddingProvider& provider, Bm25Params params)
    : relations_(std::move(relations)), provider_(&provider), params_(params) {
    std::size_t total_length = 0;
    tokens_.reserve(relations_.size());
    for (const auto& relation : relations_) {
        auto toks = tokenize_relation(relation.str());
        total_length += toks.size();
        for (const auto& t : std::unordered_set<std::string>(toks.begin(), toks.end())) ++df_[t];
        tokens_.push_back(std::move(toks));
    }
    if (!relations_.empty()) {
        avg_length_ = static_cast<double>(total_length) / static_cast<double>(relations_.size());
        std::vector<std::string> texts;
        texts.reserve(relations_.size());
        for (const auto& r : relations_) texts.push_back(r.str());
        embeddings_ = provider.embed(texts);
    }
}

std::size_t RelationCorpus::document_frequency(const std::string& token) const {
    auto it = df_.find(token);
    return it == df_.end() ? 0 : it->second;
}

RelationScores bm25_scores(const RelationCorpus& corpus, std::span<const std::string> query_tokens) {
    if (corpus.empty()) throw ArgumentError("BM25 over an empty relation corpus");
    const auto& p = corpus.params();
    const double n_docs = static_cast<double>(corpus.size());
    const double avgdl = corpus.average_length();

    std::set<std::string> terms(query_tokens.begin(), query_tokens.end());
    std::vector<std::pair<double, std::string>> weighted;
    for (const auto& term : terms) {
        const double df = static_cast<double>(corpus.document_frequency(term));
        if (df == 0.0) continue;
        weighted.emplace_back(std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5)), term);
    }

    RelationScores out;
    out.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& doc = corpus.tokens()[i];
        const double dl = static_cast<double>(doc.size());
        const double norm = avgdl > 0.0 ? dl / avgdl : 1.0;
        double score = 0.0;
        for (const auto& [idf, term] : weighted) {
            const double tf = static_cast<double>(std::count(doc.begin(), doc.end(), term));
            if (tf == 0.0) continue;
            score += idf * tf * (p.k1 + 1.0) / (tf + p.k1 * (1.0 - p.b + p.b * norm));
        }
        out.emplace_back(corpus.relations()[i], score);
    }
    return out;
}

RelationScores dense_scores(const RelationCorpus& corpus, const std::string& query_text) {
    const auto query = corpus.provider().embed_one(query_text);
    RelationScores out;
    out.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        out.emplace_back(corpus.relations()[i], dot(query, corpus.embeddings()[i]));
    }
    return out;
}

std::vector<double> min_max_normalize(std::span<const double> scores) {
    std::vector<double> out(scores.size(), 0.0);
    if (scores.empty()) return out;
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const double range = *hi - *lo;
    if (range <= 0.0) return out;
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - *lo) / range;
    return out;
}

std::vector<double> fuse_scores(std::span<const double> lexical, std::span<const double> dense,
                                double lexical_weight) {
    if (lexical.size() != dense.size()) throw ArgumentError("score lists differ in length");
    auto lex = min_max_normalize(lexical);
    auto den = min_max_normalize(dense);
    std::vector<double> fused(lex.size());
    for (std::size_t i = 0; i < fused.size(); ++i) {
        fused[i] = lexical_weight * lex[i] + (1.0 - lexical_weight) * den[i];
    }
    return fused;
}

std::vector<ScoredRelation> hybrid_top_n(const RelationCorpus& corpus, const std::string& query,
                                         std::size_t n, double lexical_weight) {
    if (corpus.empty()) throw ArgumentError("hybrid search over an empty relation corpus");
    if (n == 0) throw ArgumentError("n must be positive");
    if (lexical_weight < 0.0 || lexical_weight > 1.0) {
        throw ArgumentError("lexical weight must lie in [0,1]");
    }
    const auto lexical = bm25_scores(corpus, tokenize_relation(query));
    const auto dense = dense_scores(corpus, query);
    std::vector<double> lex_values;
    std::vector<double> dense_values;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        lex_values.push_back(lexical[i].second);
        dense_values.push_back(dense[i].second);
    }
    const auto fused = fuse_scores(lex_values, dense_values, lexical_weight);

    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    const auto take = std::min(n, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (fused[a] != fused[b]) return fused[a] > fused[b];
                          return corpus.relations()[a] < corpus.relations()[b];
                      });
    std::vector<ScoredRelation> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.push_back({corpus.relations()[order[i]], fused[order[i]]});
    }
    return out;
}

std::vector<RelationId> load_relation_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open relation vocabulary: " + path);
    std::set<RelationId> seen;
    std::string line;
    while (std::getline(in, line)) {
        auto trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        seen.insert(RelationId(std::string(trimmed)));
    }
    return {seen.begin(), seen.end()};
}

}  // namespace srp
