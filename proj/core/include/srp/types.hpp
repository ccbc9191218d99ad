#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srp {

template <class Tag>
class StrongId {
public:
    StrongId() = default;
    explicit StrongId(std::string value) : value_(std::move(value)) {}

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    friend auto operator<=>(const StrongId&, const StrongId&) = default;
    friend bool operator==(const StrongId&, const StrongId&) = default;

private:
    std::string value_;
};

using EntityId = StrongId<struct EntityTag>;
using RelationId = StrongId<struct RelationTag>;

struct Triple {
    EntityId head;
    RelationId relation;
    EntityId tail;

    friend auto operator<=>(const Triple&, const Triple&) = default;
    friend bool operator==(const Triple&, const Triple&) = default;
};

// Chain of triples where each tail is the next head.
struct TripletSequence {
    std::vector<Triple> triples;

    bool empty() const noexcept { return triples.empty(); }
    std::size_t size() const noexcept { return triples.size(); }
    bool chain_connected() const noexcept;

    friend auto operator<=>(const TripletSequence&, const TripletSequence&) = default;
    friend bool operator==(const TripletSequence&, const TripletSequence&) = default;
};

// A topic entity followed by the relation names an LLM predicted. The names
// need not exist in the graph; instantiation maps them onto real relations.
struct ReasoningPath {
    EntityId start;
    std::vector<std::string> relations;

    friend bool operator==(const ReasoningPath&, const ReasoningPath&) = default;
    friend auto operator<=>(const ReasoningPath&, const ReasoningPath&) = default;
};

// "e -> r0 -> r1"
std::string to_arrow(const ReasoningPath& path);
std::string to_arrow(const ReasoningPath& path, std::string_view start_display);

// Inverse of to_arrow. Throws ParseError when fewer than two segments remain
// after trimming.
ReasoningPath parse_arrow(std::string_view text);

struct ScoredRelation {
    RelationId relation;
    double score = 0.0;

    friend bool operator==(const ScoredRelation&, const ScoredRelation&) = default;
};

// A solved case injected into prompts as guidance.
struct Reference {
    std::string question;
    std::vector<ReasoningPath> reasoning_paths;
    std::vector<std::string> answers;

    friend bool operator==(const Reference&, const Reference&) = default;
};

void validate(const Reference& reference);

struct TopicEntity {
    EntityId id;
    std::string label;  // empty when the id is already readable

    const std::string& display() const noexcept { return label.empty() ? id.str() : label; }
    friend bool operator==(const TopicEntity&, const TopicEntity&) = default;
};

struct Question {
    std::string id;
    std::string text;
    std::vector<TopicEntity> topic_entities;
    std::vector<std::string> gold_answers;  // evaluation only
    std::string level;                      // GrailQA generalization level, empty otherwise

    friend bool operator==(const Question&, const Question&) = default;
};

// Maps an entity to the text shown to the model (label, id, or "<cvt></cvt>").
using EntityDisplay = std::function<std::string(const EntityId&)>;

std::string identity_display(const EntityId& id);

enum class TripleStyle { plain, quoted };

// plain:  [(h, r, t), (h, r, t)]
// quoted: [("h", "r", "t"), ("h", "r", "t")]
std::string render_triple(const Triple& triple, const EntityDisplay& display,
                          TripleStyle style = TripleStyle::plain);
std::string render_sequence(const TripletSequence& sequence, const EntityDisplay& display,
                            TripleStyle style = TripleStyle::plain);

}  // namespace srp

template <class Tag>
struct std::hash<srp::StrongId<Tag>> {
    std::size_t operator()(const srp::StrongId<Tag>& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
