#include "srp/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "srp/error.hpp"
#include "text_util.hpp"

namespace srp {

std::string KnowledgeGraph::display(const EntityId& entity) const {
    auto text = label(entity);
    return text ? *text : entity.str();
}

std::string KnowledgeGraph::display_or_cvt(const EntityId& entity) const {
    return is_cvt(entity) ? std::string("<cvt></cvt>") : display(entity);
}

bool looks_like_mid(std::string_view id) {
    if (id.size() < 3 || (id[0] != 'm' && id[0] != 'g') || id[1] != '.') return false;
    return std::all_of(id.begin() + 2, id.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || c == '_';
    });
}

TripleStore::TripleStore(std::vector<Triple> triples, std::map<EntityId, std::string> labels,
                         std::set<EntityId> cvt_marks)
    : triples_(std::move(triples)), labels_(std::move(labels)), cvt_marks_(std::move(cvt_marks)) {
    for (const auto& t : triples_) {
        if (t.head.empty() || t.relation.empty() || t.tail.empty()) {
            throw ArgumentError("triple with an empty field");
        }
    }
    std::sort(triples_.begin(), triples_.end());
    triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
    // Sorted input keeps every tail list sorted as it is appended.
    for (const auto& t : triples_) outgoing_[t.head][t.relation].push_back(t.tail);
}

std::set<RelationId> TripleStore::one_hop_relations(const EntityId& entity) const {
    std::set<RelationId> out;
    if (auto it = outgoing_.find(entity); it != outgoing_.end()) {
        for (const auto& [relation, tails] : it->second) out.insert(relation);
    }
    return out;
}

std::vector<EntityId> TripleStore::successors(const EntityId& entity,
                                              const RelationId& relation) const {
    auto it = outgoing_.find(entity);
    if (it == outgoing_.end()) return {};
    auto rel = it->second.find(relation);
    if (rel == it->second.end()) return {};
    return rel->second;
}

std::optional<std::string> TripleStore::label(const EntityId& entity) const {
    if (auto it = labels_.find(entity); it != labels_.end()) return it->second;
    return std::nullopt;
}

bool TripleStore::is_cvt(const EntityId& entity) const {
    if (cvt_marks_.contains(entity)) return true;
    return looks_like_mid(entity.str()) && !labels_.contains(entity);
}

std::vector<RelationId> TripleStore::relation_vocabulary() const {
    std::set<RelationId> seen;
    for (const auto& t : triples_) seen.insert(t.relation);
    return {seen.begin(), seen.end()};
}

TripleStore load_triples_text(std::string_view text) {
    std::vector<Triple> triples;
    std::map<EntityId, std::string> labels;
    std::set<EntityId> cvt_marks;

    auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = lines[i];
        const std::size_t line_no = i + 1;
        if (detail::trim(line).empty() || line.front() == '#') continue;

        auto fields = detail::split(line, "\t");
        auto fail = [&](const std::string& why) {
            throw ParseError("line " + std::to_string(line_no) + ": " + why, std::string(line),
                             line_no);
        };
        for (auto field : fields) {
            if (field.empty()) fail("empty field");
        }
        if (fields.front() == "@label") {
            if (fields.size() != 3) fail("@label needs an entity and a display string");
            labels[EntityId(std::string(fields[1]))] = std::string(fields[2]);
        } else if (fields.front() == "@cvt") {
            if (fields.size() != 2) fail("@cvt needs exactly one entity");
            cvt_marks.insert(EntityId(std::string(fields[1])));
        } else {
            if (fields.size() != 3) {
                fail("expected 3 tab-separated fields, found " + std::to_string(fields.size()));
            }
            triples.push_back({EntityId(std::string(fields[0])), RelationId(std::string(fields[1])),
                               EntityId(std::string(fields[2]))});
        }
    }
    return TripleStore(std::move(triples), std::move(labels), std::move(cvt_marks));
}

TripleStore load_triples(std::istream& in) {
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_triples_text(buffer.str());
}

TripleStore load_triples_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open triple file: " + path);
    return load_triples(in);
}

std::string serialize_triples(const TripleStore& store) {
    std::string out;
    for (const auto& t : store.triples()) {
        out += t.head.str() + '\t' + t.relation.str() + '\t' + t.tail.str() + '\n';
    }
    for (const auto& [entity, text] : store.labels()) {
        out += "@label\t" + entity.str() + '\t' + text + '\n';
    }
    for (const auto& entity : store.cvt_marks()) out += "@cvt\t" + entity.str() + '\n';
    return out;
}

}  // namespace srp
