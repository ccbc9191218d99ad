#include "srp/reference_base.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "srp/error.hpp"
#include "text_util.hpp"

namespace srp {

namespace {

constexpr std::string_view kBaseSchema = "srp.refbase/1";

// Independent stream for case selection so kmeans and drawing don't share state.
std::mt19937_64 selection_rng(std::uint64_t seed) { return std::mt19937_64(seed ^ 0x5EEDC0DEULL); }

}  // namespace

ReferenceBase build_reference_base(std::span<const Reference> cases,
                                   const ReferenceBaseParams& params,
                                   const EmbeddingProvider& provider) {
    if (params.target_size == 0) throw ArgumentError("target size must be positive");
    if (params.n_clusters == 0) throw ArgumentError("cluster count must be positive");
    if (params.target_size > cases.size()) {
        throw ArgumentError("target size " + std::to_string(params.target_size) +
                            " exceeds the " + std::to_string(cases.size()) + " available cases");
    }
    if (params.n_clusters > cases.size()) {
        throw ArgumentError("more clusters than cases");
    }
    if (params.target_size % params.n_clusters != 0) {
        throw ArgumentError("cluster count " + std::to_string(params.n_clusters) +
                            " does not divide target size " + std::to_string(params.target_size));
    }
    for (const auto& c : cases) validate(c);

    std::vector<std::string> questions;
    questions.reserve(cases.size());
    for (const auto& c : cases) questions.push_back(c.question);
    const auto vectors = provider.embed(questions);
    const auto clustering = kmeans(vectors, params.n_clusters, params.seed);

    std::vector<std::vector<std::size_t>> members(params.n_clusters);
    for (std::size_t i = 0; i < cases.size(); ++i) members[clustering.assignments[i]].push_back(i);

    auto rng = selection_rng(params.seed);
    const std::size_t quota = params.target_size / params.n_clusters;
    std::vector<std::pair<std::size_t, std::size_t>> picked;  // (case, cluster)
    std::vector<bool> taken(cases.size(), false);
    for (std::size_t c = 0; c < params.n_clusters; ++c) {
        auto pool = members[c];
        std::shuffle(pool.begin(), pool.end(), rng);
        for (std::size_t i = 0; i < std::min(quota, pool.size()); ++i) {
            picked.emplace_back(pool[i], c);
            taken[pool[i]] = true;
        }
    }
    if (picked.size() < params.target_size) {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            if (!taken[i]) rest.push_back(i);
        }
        std::shuffle(rest.begin(), rest.end(), rng);
        const auto deficit = params.target_size - picked.size();
        for (std::size_t i = 0; i < deficit; ++i) {
            picked.emplace_back(rest[i], clustering.assignments[rest[i]]);
        }
    }

    ReferenceBase base;
    base.provider_fingerprint = provider.fingerprint();
    base.dimension = provider.dimension();
    base.params = params;
    for (const auto& [index, cluster] : picked) {
        base.references.push_back(cases[index]);
        base.embeddings.push_back(vectors[index]);
        base.clusters.push_back(cluster);
    }
    return base;
}

std::vector<Reference> query_references(const ReferenceBase& base, const std::string& question,
                                        std::size_t k, const EmbeddingProvider& provider) {
    if (provider.fingerprint() != base.provider_fingerprint) {
        throw ConfigError("reference base was built with '" + base.provider_fingerprint +
                          "' but the query provider is '" + provider.fingerprint() + "'");
    }
    if (base.references.empty()) return {};
    const auto query = provider.embed_one(question);
    std::vector<Reference> out;
    for (const auto& hit : cosine_knn(query, base.embeddings, k)) {
        out.push_back(base.references[hit.index]);
    }
    return out;
}

std::vector<Reference> sample_references(const ReferenceBase& base, std::size_t k,
                                         std::uint64_t seed) {
    std::vector<std::size_t> order(base.references.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(std::min(k, order.size()));
    std::vector<Reference> out;
    for (auto i : order) out.push_back(base.references[i]);
    return out;
}

std::string serialize_reference_base(const ReferenceBase& base) {
    std::string out;
    json header = {{"schema", kBaseSchema},
                   {"provider", base.provider_fingerprint},
                   {"dimension", base.dimension},
                   {"seed", base.params.seed},
                   {"target_size", base.params.target_size},
                   {"n_clusters", base.params.n_clusters},
                   {"size", base.references.size()}};
    out += header.dump() + '\n';
    for (std::size_t i = 0; i < base.references.size(); ++i) {
        json row = base.references[i];
        row["embedding"] = base.embeddings[i];
        row["cluster"] = base.clusters[i];
        out += row.dump() + '\n';
    }
    return out;
}

ReferenceBase parse_reference_base(std::string_view text) {
    auto lines = detail::split_lines(text);
    std::size_t line_no = 0;
    ReferenceBase base;
    bool have_header = false;
    for (auto line : lines) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        json row = parse_json(line, line_no);
        try {
            if (!have_header) {
                if (row.value("schema", "") != kBaseSchema) {
                    throw ParseError("not a reference base (schema mismatch)", std::string(line),
                                     line_no);
                }
                base.provider_fingerprint = row.at("provider").get<std::string>();
                base.dimension = row.at("dimension").get<std::size_t>();
                base.params.seed = row.at("seed").get<std::uint64_t>();
                base.params.target_size = row.at("target_size").get<std::size_t>();
                base.params.n_clusters = row.at("n_clusters").get<std::size_t>();
                have_header = true;
                continue;
            }
            base.references.push_back(row.get<Reference>());
            auto embedding = row.at("embedding").get<EmbeddingVector>();
            if (embedding.size() != base.dimension) {
                throw ParseError("embedding dimension differs from header", std::string(line),
                                 line_no);
            }
            base.embeddings.push_back(std::move(embedding));
            base.clusters.push_back(row.value("cluster", std::size_t{0}));
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(),
                             std::string(line), line_no);
        }
    }
    if (!have_header) throw ParseError("reference base file has no header");
    return base;
}

void save_reference_base(const ReferenceBase& base, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write reference base: " + path);
    out << serialize_reference_base(base);
}

ReferenceBase load_reference_base(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open reference base: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_reference_base(buffer.str());
}

std::vector<Reference> load_reference_cases(std::istream& in) {
    std::vector<Reference> cases;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        json row = parse_json(line, line_no);
        try {
            auto reference = row.get<Reference>();
            validate(reference);
            cases.push_back(std::move(reference));
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line, line_no);
        } catch (const ArgumentError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line, line_no);
        }
    }
    return cases;
}

std::vector<Reference> load_reference_cases_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open reference cases: " + path);
    return load_reference_cases(in);
}

}  // namespace srp
