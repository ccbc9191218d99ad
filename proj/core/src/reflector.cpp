#include "srp/reflector.hpp"

#include <algorithm>
#include <set>

#include "srp/error.hpp"
#include "text_util.hpp"

namespace srp {

Judgement judge(const Question& question, std::span<const TripletSequence> sequences,
                std::span<const Reference> references, const Prompter& prompter,
                const EntityDisplay& display, const std::string& call_id) {
    if (sequences.empty()) return Judgement{};
    SequenceJudgePayload payload{question.text, {sequences.begin(), sequences.end()}, display};
    auto messages = prompter.render(PromptFamily::sequence_judge, references, payload);
    try {
        return prompter.gateway().complete_parsed(
            {call_id, PromptFamily::sequence_judge}, std::move(messages),
            [&](const std::string& reply) { return parse_judgement(reply, sequences, display); });
    } catch (const ParseError& e) {
        throw ReflectionError(std::string("judgement unreadable: ") + e.what());
    }
}

std::vector<std::string> feedback_lines(const InstantiationResult& instantiation,
                                        const EditFeedback& /*feedback*/) {
    // A path that instantiated cleanly but did not satisfy the judge.
    std::vector<std::string> lines = instantiation.error_messages;
    if (lines.empty()) lines.emplace_back(kNotEnoughMessage);
    return lines;
}

InstantiationResult edit_view(const InstantiationResult& instantiation,
                              const EditFeedback& feedback, const KnowledgeGraph& kg) {
    InstantiationResult view = instantiation;
    std::map<std::string, std::set<RelationId>> merged;
    for (const auto& seq : feedback.pruned) {
        if (seq.empty()) continue;
        auto rels = kg.one_hop_relations(seq.triples.back().tail);
        merged[prefix_key(kg, instantiation.path.start, seq.triples)].insert(rels.begin(),
                                                                             rels.end());
    }
    if (merged.empty()) return view;
    view.frontier_candidates.clear();
    for (auto& [key, rels] : merged) view.frontier_candidates[key].assign(rels.begin(), rels.end());
    return view;
}

namespace {

ReasoningPath anchor(ReasoningPath edited, const ReasoningPath& current, const Question& question,
                     const KnowledgeGraph& kg) {
    const auto& name = edited.start.str();
    if (name == current.start.str() || name == kg.display(current.start)) {
        edited.start = current.start;
    } else if (const TopicEntity* entity = [&]() -> const TopicEntity* {
                   for (const auto& e : question.topic_entities) {
                       if (e.id.str() == name || e.display() == name) return &e;
                   }
                   return nullptr;
               }()) {
        edited.start = entity->id;
    } else {
        // The edit may not move the path away from its topic entity.
        edited.start = current.start;
    }
    return edited;
}

constexpr std::string_view kNoChangeNote =
    "Your Final Path is the same as the Initial Path. Avoid generating Final Path that are the "
    "same as the Initial Path; give a different Final Path.";

}  // namespace

ReasoningPath edit_path(const Question& question, const ReasoningPath& current,
                        const InstantiationResult& instantiation, const EditFeedback& feedback,
                        std::span<const Reference> references, const Prompter& prompter,
                        const KnowledgeGraph& kg, const std::string& call_id) {
    PathEditPayload payload{
        question.text, to_arrow(current, kg.display(current.start)),
        feedback_lines(instantiation, feedback),
        render_instantiation_context(edit_view(instantiation, feedback, kg), kg),
        feedback.judge_message};
    auto messages = prompter.render(PromptFamily::path_edit, references, payload);
    const CallContext context{call_id, PromptFamily::path_edit};

    auto parse = [&](const std::string& reply) {
        return anchor(parse_edited_path(reply), current, question, kg);
    };
    try {
        std::string reply = prompter.gateway().complete(context, messages);
        ReasoningPath edited;
        try {
            edited = parse(reply);
        } catch (const ParseError& error) {
            messages.push_back({Role::assistant, reply});
            messages.push_back({Role::user, corrective_instruction(error)});
            reply = prompter.gateway().complete(context, messages);
            edited = parse(reply);
        }
        if (edited != current) return edited;

        messages.push_back({Role::assistant, reply});
        messages.push_back({Role::user, std::string(kNoChangeNote)});
        edited = parse(prompter.gateway().complete(context, messages));
        if (edited != current) return edited;
    } catch (const ParseError& e) {
        throw ReflectionError(std::string("edited path unreadable: ") + e.what());
    }
    throw ReflectionError("edit produced no change");
}

Answer answer(const Question& question, std::span<const TripletSequence> pruned,
              const Prompter& prompter, const EntityDisplay& display,
              const std::string& call_id) {
    AnsweringPayload payload{question.text, {}, display};
    std::set<Triple> seen;
    for (const auto& seq : pruned) {
        for (const auto& t : seq.triples) {
            if (seen.insert(t).second) payload.triples.push_back(t);
        }
    }
    auto messages = prompter.render(PromptFamily::answering, {}, payload);
    Answer result;
    result.raw_text = prompter.gateway().complete({call_id, PromptFamily::answering}, messages);
    result.values = parse_answer(result.raw_text);
    result.grounded = !payload.triples.empty();
    return result;
}

}  // namespace srp
