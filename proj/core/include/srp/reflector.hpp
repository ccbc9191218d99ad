#pragma once

#include <span>
#include <string>
#include <vector>

#include "srp/kg_store.hpp"
#include "srp/parsers.hpp"
#include "srp/prompts.hpp"
#include "srp/retriever.hpp"

namespace srp {

struct Answer {
    std::vector<std::string> values;
    bool grounded = false;  // produced from at least one retrieved triple
    std::string raw_text;

    friend bool operator==(const Answer&, const Answer&) = default;
};

// Asks the model whether the sequences hold the answer and which prefix of
// each to keep. An empty sequence list is NO_ANSWER without a model call.
Judgement judge(const Question& question, std::span<const TripletSequence> sequences,
                std::span<const Reference> references, const Prompter& prompter,
                const EntityDisplay& display, const std::string& call_id);

struct EditFeedback {
    std::string judge_message;
    bool judged_no_answer = false;
    std::vector<TripletSequence> pruned;  // this path's retained sequences
};

// The error lines shown to the model for this path.
std::vector<std::string> feedback_lines(const InstantiationResult& instantiation,
                                        const EditFeedback& feedback);

// Instantiation result as the edit prompt should see it: candidates come from
// the tails of the retained sequences when there are any.
InstantiationResult edit_view(const InstantiationResult& instantiation,
                              const EditFeedback& feedback, const KnowledgeGraph& kg);

// Rewrites the path. Never returns the input path: an unchanged edit is
// retried once, then ReflectionError("edit produced no change").
ReasoningPath edit_path(const Question& question, const ReasoningPath& current,
                        const InstantiationResult& instantiation, const EditFeedback& feedback,
                        std::span<const Reference> references, const Prompter& prompter,
                        const KnowledgeGraph& kg, const std::string& call_id);

// Final chain-of-thought answer from the retained triples (may be none).
Answer answer(const Question& question, std::span<const TripletSequence> pruned,
              const Prompter& prompter, const EntityDisplay& display, const std::string& call_id);

}  // namespace srp
