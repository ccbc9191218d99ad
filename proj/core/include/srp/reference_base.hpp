#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srp/embeddings.hpp"
#include "srp/types.hpp"

namespace srp {

struct ReferenceBaseParams {
    std::size_t target_size = 100;
    std::size_t n_clusters = 10;
    std::uint64_t seed = 0;
};

struct ReferenceBase {
    std::vector<Reference> references;
    std::vector<EmbeddingVector> embeddings;  // one per reference question
    std::vector<std::size_t> clusters;        // cluster each reference was drawn from
    std::string provider_fingerprint;
    std::size_t dimension = 0;
    ReferenceBaseParams params;

    std::size_t size() const noexcept { return references.size(); }
};

// Embeds and clusters the case questions, then draws target_size / n_clusters
// cases per cluster. A cluster short of its quota gives all of its members and
// the deficit is drawn uniformly from the cases not yet chosen.
ReferenceBase build_reference_base(std::span<const Reference> cases,
                                   const ReferenceBaseParams& params,
                                   const EmbeddingProvider& provider);

// Top-k references by question similarity, most similar first.
// Throws ConfigError when the provider differs from the one used at build time.
std::vector<Reference> query_references(const ReferenceBase& base, const std::string& question,
                                        std::size_t k, const EmbeddingProvider& provider);

// k references drawn uniformly without replacement (the random-reference ablation).
std::vector<Reference> sample_references(const ReferenceBase& base, std::size_t k,
                                         std::uint64_t seed);

// JSON Lines: a header object, then one object per reference.
std::string serialize_reference_base(const ReferenceBase& base);
ReferenceBase parse_reference_base(std::string_view text);
void save_reference_base(const ReferenceBase& base, const std::string& path);
ReferenceBase load_reference_base(const std::string& path);

// Reference cases: {question, paths, answers} per line.
std::vector<Reference> load_reference_cases(std::istream& in);
std::vector<Reference> load_reference_cases_file(const std::string& path);

}  // namespace srp
