#include "srp/planner.hpp"

#include <algorithm>

#include "srp/error.hpp"
#include "srp/parsers.hpp"
#include "srp/relation_index.hpp"
#include "text_util.hpp"

namespace srp {

std::vector<RelationId> rank_candidates(const std::set<RelationId>& candidates,
                                        const std::string& question_text,
                                        const EmbeddingProvider& provider, std::size_t cap) {
    std::vector<RelationId> all(candidates.begin(), candidates.end());
    if (all.size() <= cap) return all;
    RelationCorpus corpus(std::move(all), provider);
    std::vector<RelationId> out;
    for (auto& scored : hybrid_top_n(corpus, question_text, cap)) out.push_back(scored.relation);
    return out;
}

std::vector<ScoredRelation> relation_check(const Question& question, const TopicEntity& entity,
                                           std::span<const RelationId> candidates,
                                           std::span<const Reference> references,
                                           const Prompter& prompter, const std::string& call_id,
                                           std::size_t top_k) {
    if (candidates.empty()) throw PlanningError("entity has no outgoing relations");
    if (top_k == 0) throw ArgumentError("relation check needs top_k >= 1");

    RelationCheckPayload payload{question.text, entity.display(), {}, top_k};
    for (const auto& r : candidates) payload.candidates.push_back(r.str());
    auto messages = prompter.render(PromptFamily::relation_check, references, payload);

    std::vector<ScoredRelation> parsed;
    try {
        parsed = prompter.gateway().complete_parsed(
            {call_id, PromptFamily::relation_check}, std::move(messages),
            [](const std::string& reply) { return parse_scored_relations(reply); });
    } catch (const ParseError& e) {
        throw PlanningError(std::string("relation check output unreadable: ") + e.what());
    }

    const std::set<RelationId> allowed(candidates.begin(), candidates.end());
    std::map<RelationId, double> best;
    for (const auto& s : parsed) {
        if (!allowed.contains(s.relation)) continue;
        auto [it, inserted] = best.emplace(s.relation, s.score);
        if (!inserted) it->second = std::max(it->second, s.score);
    }
    std::vector<ScoredRelation> out;
    for (const auto& [relation, score] : best) out.push_back({relation, score});
    std::sort(out.begin(), out.end(), [](const ScoredRelation& a, const ScoredRelation& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.relation < b.relation;
    });
    if (out.size() > top_k) out.resize(top_k);
    return out;
}

const TopicEntity* resolve_topic_entity(const Question& question, std::string_view name) {
    name = detail::trim(name);
    for (const auto& e : question.topic_entities) {
        if (e.id.str() == name) return &e;
    }
    for (const auto& e : question.topic_entities) {
        if (!e.label.empty() && e.label == name) return &e;
    }
    for (const auto& e : question.topic_entities) {
        if (detail::iequals(e.id.str(), name) || detail::iequals(e.label, name)) return &e;
    }
    return nullptr;
}

PathPlan generate_paths(const Question& question, const InitialRelations& initial_relations,
                        const Prompter& prompter, const std::string& call_id) {
    PathGenerationPayload payload{question.text, {}, {}};
    for (const auto& entity : question.topic_entities) {
        auto it = initial_relations.find(entity.id);
        if (it == initial_relations.end() || it->second.empty()) continue;
        std::vector<std::string> relations;
        for (const auto& s : it->second) relations.push_back(s.relation.str());
        payload.topic_entities.push_back(entity.display());
        payload.valuable_relations.emplace_back(entity.display(), std::move(relations));
    }
    if (payload.valuable_relations.empty()) {
        throw PlanningError("no topic entity has initial relations");
    }
    auto messages = prompter.render(PromptFamily::path_generation, {}, payload);

    auto parse = [&](const std::string& reply) {
        PathPlan plan;
        for (const auto& [key, paths] : parse_generated_paths(reply)) {
            for (const auto& path : paths) {
                const TopicEntity* entity = resolve_topic_entity(question, path.start.str());
                if (entity == nullptr) continue;
                auto it = initial_relations.find(entity->id);
                PlannedPath planned{{entity->id, path.relations}, true};
                if (it != initial_relations.end()) {
                    planned.off_plan = std::none_of(
                        it->second.begin(), it->second.end(), [&](const ScoredRelation& s) {
                            return s.relation.str() == path.relations.front();
                        });
                }
                auto& bucket = plan[entity->id];
                if (std::find(bucket.begin(), bucket.end(), planned) == bucket.end()) {
                    bucket.push_back(std::move(planned));
                }
            }
        }
        if (plan.empty()) throw ParseError("no generated path starts at a topic entity", reply);
        return plan;
    };

    try {
        return prompter.gateway().complete_parsed({call_id, PromptFamily::path_generation},
                                                  std::move(messages), parse);
    } catch (const ParseError& e) {
        throw PlanningError(std::string("path generation failed: ") + e.what());
    }
}

}  // namespace srp
