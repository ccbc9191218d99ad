#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "srp/embeddings.hpp"
#include "srp/prompts.hpp"
#include "srp/types.hpp"

namespace srp {

// Keeps at most cap candidates, ranked by hybrid similarity to the question.
// Returns all candidates (sorted) when there are no more than cap.
std::vector<RelationId> rank_candidates(const std::set<RelationId>& candidates,
                                        const std::string& question_text,
                                        const EmbeddingProvider& provider, std::size_t cap);

// LLM scoring of the entity's 1-hop relations. Output is a subset of the
// candidates, at most top_k long, sorted by score then id.
std::vector<ScoredRelation> relation_check(const Question& question, const TopicEntity& entity,
                                           std::span<const RelationId> candidates,
                                           std::span<const Reference> references,
                                           const Prompter& prompter, const std::string& call_id,
                                           std::size_t top_k = 3);

struct PlannedPath {
    ReasoningPath path;
    bool off_plan = false;  // first relation is not one of the checked initial relations

    friend bool operator==(const PlannedPath&, const PlannedPath&) = default;
};

using InitialRelations = std::map<EntityId, std::vector<ScoredRelation>>;
using PathPlan = std::map<EntityId, std::vector<PlannedPath>>;

// Matches a name the model used (id or label, case-insensitively as a last
// resort) back to one of the question's topic entities.
const TopicEntity* resolve_topic_entity(const Question& question, std::string_view name);

// Generates reasoning paths from the topic entities. Paths that start
// anywhere but a topic entity are dropped; PlanningError if none survive.
PathPlan generate_paths(const Question& question, const InitialRelations& initial_relations,
                        const Prompter& prompter, const std::string& call_id);

}  // namespace srp
