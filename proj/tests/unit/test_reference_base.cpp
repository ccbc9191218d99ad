#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "srp/error.hpp"
#include "srp/reference_base.hpp"

namespace srp {
namespace {

Reference make_case(std::string question, std::string answer) {
    return Reference{std::move(question), {parse_arrow("e -> r.s")}, {std::move(answer)}};
}

std::vector<Reference> numbered_cases(std::size_t n) {
    std::vector<Reference> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(make_case("question number " + std::to_string(i) + " about topic " +
                                    std::to_string(i % 7),
                                "a" + std::to_string(i)));
    }
    return out;
}

// Four vocabularies with no shared words or trigrams.
std::vector<Reference> grouped_cases(std::size_t per_group) {
    const std::vector<std::vector<std::string>> vocab{
        {"volcano", "magma", "eruption", "lava"},
        {"symphony", "violin", "orchestra", "concerto"},
        {"football", "goalkeeper", "stadium", "league"},
        {"quantum", "photon", "boson", "quark"}};
    std::vector<Reference> out;
    for (std::size_t g = 0; g < vocab.size(); ++g) {
        for (std::size_t i = 0; i < per_group; ++i) {
            std::string q;
            for (std::size_t w = 0; w < vocab[g].size(); ++w) {
                if (w == i % vocab[g].size()) continue;  // small per-case variation
                q += vocab[g][w] + " ";
            }
            q += vocab[g][0] + std::to_string(i);
            out.push_back(make_case(q, "g" + std::to_string(g)));
        }
    }
    return out;
}

TEST(ReferenceBase, ExhaustiveSelection) {
    HashingEmbedder provider;
    const auto cases = numbered_cases(100);
    const auto base = build_reference_base(cases, {100, 10, 3}, provider);
    ASSERT_EQ(base.size(), 100u);
    std::multiset<std::string> got, want;
    for (const auto& r : base.references) got.insert(r.question);
    for (const auto& r : cases) want.insert(r.question);
    EXPECT_EQ(got, want);
}

TEST(ReferenceBase, EqualDrawPerSeparatedGroup) {
    HashingEmbedder provider;
    const auto cases = grouped_cases(50);
    const auto base = build_reference_base(cases, {20, 4, 0}, provider);
    ASSERT_EQ(base.size(), 20u);

    // Clustering recovered by an independent kmeans run over the same vectors.
    std::vector<std::string> questions;
    for (const auto& c : cases) questions.push_back(c.question);
    const auto clustering = kmeans(provider.embed(questions), 4, 0);
    std::map<std::string, std::size_t> cluster_of;
    for (std::size_t i = 0; i < cases.size(); ++i) cluster_of[cases[i].question] = clustering.assignments[i];

    std::map<std::size_t, std::size_t> per_cluster;
    std::map<std::string, std::size_t> per_group;
    for (const auto& r : base.references) {
        ++per_cluster[cluster_of.at(r.question)];
        ++per_group[r.answers[0]];
    }
    EXPECT_EQ(per_cluster.size(), 4u);
    for (const auto& [c, n] : per_cluster) EXPECT_EQ(n, 5u);
    EXPECT_EQ(per_group.size(), 4u);
    for (const auto& [g, n] : per_group) EXPECT_EQ(n, 5u) << g;
}

TEST(ReferenceBase, ShortClusterIsBackfilled) {
    HashingEmbedder provider;
    auto cases = grouped_cases(10);
    cases.resize(32);  // last group keeps only two cases
    const auto base = build_reference_base(cases, {16, 4, 1}, provider);
    EXPECT_EQ(base.size(), 16u);
    std::set<std::string> distinct;
    for (const auto& r : base.references) distinct.insert(r.question);
    EXPECT_EQ(distinct.size(), base.size());
}

TEST(ReferenceBase, NeverDrawsTwice) {
    HashingEmbedder provider;
    const auto cases = numbered_cases(60);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto base = build_reference_base(cases, {30, 5, seed}, provider);
        std::set<std::string> distinct;
        for (const auto& r : base.references) distinct.insert(r.question);
        EXPECT_EQ(distinct.size(), 30u);
        EXPECT_EQ(base.embeddings.size(), base.references.size());
        EXPECT_EQ(base.clusters.size(), base.references.size());
    }
}

TEST(ReferenceBase, DeterministicSerialization) {
    HashingEmbedder provider;
    const auto cases = numbered_cases(40);
    const auto a = serialize_reference_base(build_reference_base(cases, {20, 4, 9}, provider));
    const auto b = serialize_reference_base(build_reference_base(cases, {20, 4, 9}, provider));
    EXPECT_EQ(a, b);
    const auto round = serialize_reference_base(parse_reference_base(a));
    EXPECT_EQ(round, a);
}

TEST(ReferenceBase, InfeasibleQuotas) {
    HashingEmbedder provider;
    const auto cases = numbered_cases(10);
    EXPECT_THROW(build_reference_base(cases, {11, 1, 0}, provider), ArgumentError);
    EXPECT_THROW(build_reference_base(cases, {10, 3, 0}, provider), ArgumentError);
    EXPECT_THROW(build_reference_base(cases, {0, 1, 0}, provider), ArgumentError);
}

TEST(QueryReferences, SelfRetrieval) {
    HashingEmbedder provider;
    const auto cases = numbered_cases(30);
    const auto base = build_reference_base(cases, {30, 3, 0}, provider);
    for (const auto& r : base.references) {
        const auto hits = query_references(base, r.question, 1, provider);
        ASSERT_EQ(hits.size(), 1u);
        EXPECT_EQ(hits[0].question, r.question);
    }
}

TEST(QueryReferences, AllWhenKIsBaseSize) {
    testing::ToyWorld world;
    const auto hits = query_references(world.base, "who directed it?", world.base.size(), world.provider);
    EXPECT_EQ(hits.size(), world.base.size());
}

TEST(QueryReferences, MatchesKnnOracleAndIsVerbatim) {
    testing::ToyWorld world;
    for (const std::string q : {"what movie did carmen electra act in?", "where was she born?",
                                "which country is the capital in", "genre of the film"}) {
        const auto hits = query_references(world.base, q, 4, world.provider);
        const auto idx = testing::oracle::knn(world.provider.embed_one(q), world.base.embeddings, 4);
        ASSERT_EQ(hits.size(), idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_EQ(hits[i], world.base.references[idx[i]]);
        EXPECT_EQ(query_references(world.base, q, 4, world.provider), hits);
    }
}

TEST(QueryReferences, FingerprintMismatchIsConfigError) {
    testing::ToyWorld world;
    HashingEmbedder other(64, 1);
    EXPECT_THROW(query_references(world.base, "q", 4, other), ConfigError);
}

TEST(SampleReferences, DeterministicWithoutReplacement) {
    testing::ToyWorld world;
    const auto a = sample_references(world.base, 4, 42);
    EXPECT_EQ(a, sample_references(world.base, 4, 42));
    std::set<std::string> distinct;
    for (const auto& r : a) distinct.insert(r.question);
    EXPECT_EQ(distinct.size(), 4u);
    EXPECT_EQ(sample_references(world.base, 100, 1).size(), world.base.size());
}

TEST(ReferenceCases, LoadAndReject) {
    std::istringstream good(R"({"question":"q?","paths":["e -> r"],"answers":["a"]})" "\n");
    EXPECT_EQ(load_reference_cases(good).size(), 1u);
    std::istringstream bad(R"({"question":"q?","paths":[],"answers":["a"]})" "\n");
    EXPECT_THROW(load_reference_cases(bad), Error);
    std::istringstream broken("{not json\n");
    EXPECT_THROW(load_reference_cases(broken), ParseError);
    EXPECT_THROW(parse_reference_base("{\"schema\":\"other\"}\n"), ParseError);
}

}  // namespace
}  // namespace srp
