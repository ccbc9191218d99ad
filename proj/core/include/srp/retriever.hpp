#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srp/kg_store.hpp"
#include "srp/relation_index.hpp"
#include "srp/types.hpp"

namespace srp {

enum class InstantiationStatus { fully_instantiated, partial };

std::string_view status_name(InstantiationStatus status);

inline constexpr std::string_view kCvtAtEndMessage = "<cvt></cvt> in the end";
inline constexpr std::string_view kNotEnoughMessage = "Current Information is not enough";
std::string not_instantiated_message(std::string_view predicted_relation);

struct InstantiationResult {
    ReasoningPath path;
    std::vector<TripletSequence> sequences;
    std::size_t depth_reached = 0;
    InstantiationStatus status = InstantiationStatus::partial;
    std::vector<std::string> error_messages;
    // "e -> r0 -> r1" prefix -> 1-hop relations of the entities it reaches
    std::map<std::string, std::vector<RelationId>> frontier_candidates;

    friend bool operator==(const InstantiationResult&, const InstantiationResult&) = default;
};

struct RetrievalOptions {
    std::size_t top_n_similar = 5;
    std::size_t fanout_cap = 10;  // tails kept per (entity, relation)
    double lexical_weight = 0.5;
};

// Walks the graph hop by hop. Each predicted relation is widened to its top-n
// similar vocabulary relations and intersected with the frontier's 1-hop
// relations; every match is expanded. Failure is reported in the result.
InstantiationResult instantiate_path(const ReasoningPath& path, const KnowledgeGraph& kg,
                                     const RelationCorpus& index,
                                     const RetrievalOptions& options = {});

// "e -> r0 -> r1" key for the prefix of sequence covering its first `length` triples.
std::string prefix_key(const KnowledgeGraph& kg, const EntityId& start,
                       std::span<const Triple> triples);

// The ">>>> Instantiation Context" body for path edit.
std::string render_instantiation_context(const InstantiationResult& result,
                                         const KnowledgeGraph& kg, std::size_t max_paths = 5,
                                         std::size_t max_candidates = 15);

}  // namespace srp
