#pragma once

// nlohmann adapters for the public value types. Kept out of the public headers.

#include "json.hpp"
#include "srp/error.hpp"
#include "srp/eval.hpp"
#include "srp/orchestrator.hpp"
#include "srp/types.hpp"

namespace srp {

using nlohmann::json;

template <class Tag>
void to_json(json& j, const StrongId<Tag>& id) { j = id.str(); }
template <class Tag>
void from_json(const json& j, StrongId<Tag>& id) { id = StrongId<Tag>(j.get<std::string>()); }

void to_json(json& j, const Triple& t);
void from_json(const json& j, Triple& t);
void to_json(json& j, const TripletSequence& s);
void from_json(const json& j, TripletSequence& s);
void to_json(json& j, const ReasoningPath& p);
void from_json(const json& j, ReasoningPath& p);
void to_json(json& j, const ScoredRelation& s);
void from_json(const json& j, ScoredRelation& s);
void to_json(json& j, const Reference& r);
void from_json(const json& j, Reference& r);
void to_json(json& j, const TopicEntity& e);
void from_json(const json& j, TopicEntity& e);
void to_json(json& j, const Question& q);
void from_json(const json& j, Question& q);

// Wraps nlohmann parse failures into ParseError.
json parse_json(std::string_view text, std::size_t line = 0);

}  // namespace srp
