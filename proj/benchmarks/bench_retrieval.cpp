#include <benchmark/benchmark.h>

#include <random>

#include "srp/embeddings.hpp"
#include "srp/kg_store.hpp"
#include "srp/relation_index.hpp"
#include "srp/retriever.hpp"

namespace {

std::vector<srp::RelationId> synthetic_vocabulary(std::size_t n) {
    const std::vector<std::string> words{"film", "actor", "person", "location", "music", "sports",
                                         "team", "award", "book", "author", "place", "country"};
    std::mt19937_64 rng(1);
    std::vector<srp::RelationId> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back(words[rng() % words.size()] + "." + words[rng() % words.size()] + "_" +
                         std::to_string(i));
    }
    return out;
}

void BM_Bm25(benchmark::State& state) {
    srp::HashingEmbedder provider;
    srp::RelationCorpus corpus(synthetic_vocabulary(state.range(0)), provider);
    const auto query = srp::tokenize_relation("film.actor.film");
    for (auto _ : state) benchmark::DoNotOptimize(srp::bm25_scores(corpus, query));
}
BENCHMARK(BM_Bm25)->Arg(1000)->Arg(10000);

void BM_HybridTopN(benchmark::State& state) {
    srp::HashingEmbedder provider;
    srp::RelationCorpus corpus(synthetic_vocabulary(state.range(0)), provider);
    for (auto _ : state) benchmark::DoNotOptimize(srp::hybrid_top_n(corpus, "actor.film", 5));
}
BENCHMARK(BM_HybridTopN)->Arg(1000)->Arg(10000);

void BM_CosineKnn(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    std::vector<srp::EmbeddingVector> corpus(state.range(0), srp::EmbeddingVector(64));
    for (auto& v : corpus) {
        for (auto& x : v) x = normal(rng);
    }
    srp::EmbeddingVector query(64);
    for (auto& x : query) x = normal(rng);
    for (auto _ : state) benchmark::DoNotOptimize(srp::cosine_knn(query, corpus, 4));
}
BENCHMARK(BM_CosineKnn)->Arg(100)->Arg(10000);

void BM_InstantiatePath(benchmark::State& state) {
    static const auto store = srp::load_triples_file(std::string(SRP_DATA_DIR) + "/graph.tsv");
    srp::HashingEmbedder provider;
    srp::RelationCorpus index(store.relation_vocabulary(), provider);
    const srp::ReasoningPath path{srp::EntityId("m.01lbp"), {"actor.film", "performance.film"}};
    for (auto _ : state) benchmark::DoNotOptimize(srp::instantiate_path(path, store, index));
}
BENCHMARK(BM_InstantiatePath);

}  // namespace

BENCHMARK_MAIN();
