#include "srp/types.hpp"

#include "srp/error.hpp"
#include "text_util.hpp"

namespace srp {

bool TripletSequence::chain_connected() const noexcept {
    for (std::size_t i = 1; i < triples.size(); ++i) {
        if (triples[i - 1].tail != triples[i].head) return false;
    }
    return true;
}

std::string to_arrow(const ReasoningPath& path) { return to_arrow(path, path.start.str()); }

std::string to_arrow(const ReasoningPath& path, std::string_view start_display) {
    std::string out(start_display);
    for (const auto& relation : path.relations) {
        out += " -> ";
        out += relation;
    }
    return out;
}

ReasoningPath parse_arrow(std::string_view text) {
    std::vector<std::string> segments;
    for (auto part : detail::split(text, "->")) {
        auto trimmed = detail::trim(part);
        if (trimmed.empty()) throw ParseError("empty segment in path", std::string(text));
        segments.emplace_back(trimmed);
    }
    if (segments.size() < 2) {
        throw ParseError("path needs an entity and at least one relation", std::string(text));
    }
    ReasoningPath path{EntityId(segments.front()), {}};
    path.relations.assign(segments.begin() + 1, segments.end());
    return path;
}

void validate(const Reference& reference) {
    if (reference.question.empty()) throw ArgumentError("reference without a question");
    if (reference.reasoning_paths.empty()) {
        throw ArgumentError("reference without reasoning paths: " + reference.question);
    }
    if (reference.answers.empty()) {
        throw ArgumentError("reference without answers: " + reference.question);
    }
}

std::string identity_display(const EntityId& id) { return id.str(); }

std::string render_triple(const Triple& triple, const EntityDisplay& display, TripleStyle style) {
    if (style == TripleStyle::quoted) {
        return "(\"" + display(triple.head) + "\", \"" + triple.relation.str() + "\", \"" +
               display(triple.tail) + "\")";
    }
    return "(" + display(triple.head) + ", " + triple.relation.str() + ", " +
           display(triple.tail) + ")";
}

std::string render_sequence(const TripletSequence& sequence, const EntityDisplay& display,
                            TripleStyle style) {
    std::string out = "[";
    for (std::size_t i = 0; i < sequence.triples.size(); ++i) {
        if (i) out += ", ";
        out += render_triple(sequence.triples[i], display, style);
    }
    out += "]";
    return out;
}

}  // namespace srp
