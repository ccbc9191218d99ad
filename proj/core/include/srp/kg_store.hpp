#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "srp/types.hpp"

namespace srp {

// Read-only view of a knowledge graph. Traversal follows outgoing edges only.
// Unknown entities yield empty results, never errors.
class KnowledgeGraph {
public:
    virtual ~KnowledgeGraph() = default;

    virtual std::set<RelationId> one_hop_relations(const EntityId& entity) const = 0;
    // Sorted lexicographically, duplicate-free.
    virtual std::vector<EntityId> successors(const EntityId& entity,
                                             const RelationId& relation) const = 0;
    virtual std::optional<std::string> label(const EntityId& entity) const = 0;
    virtual bool is_cvt(const EntityId& entity) const = 0;

    // Label if present, else the id.
    std::string display(const EntityId& entity) const;
    // Like display(), but CVT nodes print as "<cvt></cvt>".
    std::string display_or_cvt(const EntityId& entity) const;
};

// Freebase machine id shape: "m." or "g." followed by [0-9a-z_].
bool looks_like_mid(std::string_view id);

// In-memory triple store. Immutable once built; safe for concurrent reads.
//
// Text format (UTF-8, LF):
//   # comment
//   head<TAB>relation<TAB>tail
//   @label<TAB>entity<TAB>display text
//   @cvt<TAB>entity
class TripleStore final : public KnowledgeGraph {
public:
    TripleStore() = default;
    explicit TripleStore(std::vector<Triple> triples,
                         std::map<EntityId, std::string> labels = {},
                         std::set<EntityId> cvt_marks = {});

    std::set<RelationId> one_hop_relations(const EntityId& entity) const override;
    std::vector<EntityId> successors(const EntityId& entity,
                                     const RelationId& relation) const override;
    std::optional<std::string> label(const EntityId& entity) const override;
    // Explicit marks win; otherwise an unlabeled MID counts as a CVT node.
    bool is_cvt(const EntityId& entity) const override;

    // Sorted, duplicate-free.
    const std::vector<Triple>& triples() const noexcept { return triples_; }
    const std::map<EntityId, std::string>& labels() const noexcept { return labels_; }
    const std::set<EntityId>& cvt_marks() const noexcept { return cvt_marks_; }
    std::size_t size() const noexcept { return triples_.size(); }

    // Distinct relations in the store, sorted.
    std::vector<RelationId> relation_vocabulary() const;

private:
    std::vector<Triple> triples_;
    std::unordered_map<EntityId, std::map<RelationId, std::vector<EntityId>>> outgoing_;
    std::map<EntityId, std::string> labels_;
    std::set<EntityId> cvt_marks_;
};

TripleStore load_triples(std::istream& in);
TripleStore load_triples_text(std::string_view text);
TripleStore load_triples_file(const std::string& path);

// Serializes in the format load_triples reads; output is deterministic.
std::string serialize_triples(const TripleStore& store);

}  // namespace srp
