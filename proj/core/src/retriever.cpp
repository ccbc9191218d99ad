#include "srp/retriever.hpp"

#include <algorithm>
#include <set>

#include "text_util.hpp"

namespace srp {

std::string_view status_name(InstantiationStatus status) {
    return status == InstantiationStatus::fully_instantiated ? "fully_instantiated" : "partial";
}

std::string not_instantiated_message(std::string_view predicted_relation) {
    return "relation \"" + std::string(predicted_relation) + "\" not instantiated";
}

std::string prefix_key(const KnowledgeGraph& kg, const EntityId& start,
                       std::span<const Triple> triples) {
    std::string key = kg.display(start);
    for (const auto& t : triples) key += " -> " + t.relation.str();
    return key;
}

namespace {

const EntityId& tail_of(const TripletSequence& seq, const EntityId& start) {
    return seq.empty() ? start : seq.triples.back().tail;
}

// prefix key -> union of 1-hop relations of the entities reached by that prefix
std::map<std::string, std::vector<RelationId>> frontier_of(
    const std::vector<TripletSequence>& sequences, const EntityId& start,
    const KnowledgeGraph& kg) {
    std::map<std::string, std::set<RelationId>> merged;
    for (const auto& seq : sequences) {
        auto& bucket = merged[prefix_key(kg, start, seq.triples)];
        auto rels = kg.one_hop_relations(tail_of(seq, start));
        bucket.insert(rels.begin(), rels.end());
    }
    std::map<std::string, std::vector<RelationId>> out;
    for (auto& [key, rels] : merged) out[key].assign(rels.begin(), rels.end());
    return out;
}

}  // namespace

InstantiationResult instantiate_path(const ReasoningPath& path, const KnowledgeGraph& kg,
                                     const RelationCorpus& index,
                                     const RetrievalOptions& options) {
    InstantiationResult result;
    result.path = path;

    std::vector<TripletSequence> current{TripletSequence{}};
    for (std::size_t depth = 0; depth < path.relations.size(); ++depth) {
        std::set<RelationId> similar;
        if (!index.empty()) {
            for (const auto& s : hybrid_top_n(index, path.relations[depth], options.top_n_similar,
                                              options.lexical_weight)) {
                similar.insert(s.relation);
            }
        }
        std::vector<TripletSequence> next;
        for (const auto& seq : current) {
            const EntityId& head = tail_of(seq, path.start);
            for (const auto& relation : kg.one_hop_relations(head)) {
                if (!similar.contains(relation)) continue;
                auto tails = kg.successors(head, relation);
                if (tails.size() > options.fanout_cap) tails.resize(options.fanout_cap);
                for (auto& tail : tails) {
                    TripletSequence extended = seq;
                    extended.triples.push_back({head, relation, std::move(tail)});
                    next.push_back(std::move(extended));
                }
            }
        }
        if (next.empty()) {
            result.depth_reached = depth;
            result.status = InstantiationStatus::partial;
            result.error_messages.push_back(not_instantiated_message(path.relations[depth]));
            result.frontier_candidates = frontier_of(current, path.start, kg);
            for (auto& seq : current) {
                if (!seq.empty()) result.sequences.push_back(std::move(seq));
            }
            return result;
        }
        current = std::move(next);
    }

    result.depth_reached = path.relations.size();
    result.sequences = std::move(current);
    result.status = InstantiationStatus::fully_instantiated;
    const bool all_cvt =
        !result.sequences.empty() &&
        std::all_of(result.sequences.begin(), result.sequences.end(),
                    [&](const TripletSequence& s) { return kg.is_cvt(s.triples.back().tail); });
    if (all_cvt) {
        result.status = InstantiationStatus::partial;
        result.error_messages.emplace_back(kCvtAtEndMessage);
        result.frontier_candidates = frontier_of(result.sequences, path.start, kg);
    }
    return result;
}

std::string render_instantiation_context(const InstantiationResult& result,
                                         const KnowledgeGraph& kg, std::size_t max_paths,
                                         std::size_t max_candidates) {
    std::set<std::string> rendered;
    for (const auto& seq : result.sequences) {
        if (seq.empty()) continue;
        std::string line = kg.display_or_cvt(seq.triples.front().head);
        for (const auto& t : seq.triples) {
            line += " -> " + t.relation.str() + " -> " + kg.display_or_cvt(t.tail);
        }
        rendered.insert(std::move(line));
    }
    std::string out = "Instantiate Paths: ";
    if (rendered.empty()) {
        out += "none";
    } else {
        std::size_t shown = 0;
        for (const auto& line : rendered) {
            if (shown == max_paths) break;
            if (shown++) out += "\n";
            out += line;
        }
    }
    if (!result.frontier_candidates.empty()) {
        out += "\nCandidate Relations: {";
        bool first = true;
        for (const auto& [key, relations] : result.frontier_candidates) {
            if (!first) out += ", ";
            first = false;
            out += "'" + key + "': [";
            for (std::size_t i = 0; i < relations.size() && i < max_candidates; ++i) {
                if (i) out += ", ";
                out += "'" + relations[i].str() + "'";
            }
            out += "]";
        }
        out += "}";
    }
    return out;
}

}  // namespace srp
