#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "srp/llm_gateway.hpp"
#include "srp/types.hpp"

namespace srp {

struct RelationCheckPayload {
    std::string question;
    std::string topic_entity;
    std::vector<std::string> candidates;
    std::size_t top_k = 3;
};

struct PathGenerationPayload {
    std::string question;
    std::vector<std::string> topic_entities;
    // entity -> relations worth starting from, in display order
    std::vector<std::pair<std::string, std::vector<std::string>>> valuable_relations;
};

struct SequenceJudgePayload {
    std::string question;
    std::vector<TripletSequence> sequences;
    EntityDisplay display = identity_display;
};

struct PathEditPayload {
    std::string question;
    std::string initial_path;
    std::vector<std::string> error_messages;
    std::string instantiation_context;
    std::string judge_message;
};

struct AnsweringPayload {
    std::string question;
    std::vector<Triple> triples;
    EntityDisplay display = identity_display;
};

using PromptPayload = std::variant<RelationCheckPayload, PathGenerationPayload,
                                   SequenceJudgePayload, PathEditPayload, AnsweringPayload>;

// Worked examples appended after the instruction, per family.
class DemonstrationSet {
public:
    // The built-in single demonstration per family.
    static DemonstrationSet builtin();
    // Reads <dir>/<family>.txt; demonstrations are separated by a line "---".
    // Families without a file keep the built-in demonstration.
    static DemonstrationSet load(const std::string& dir);

    const std::vector<std::string>& of(PromptFamily family) const;
    void set(PromptFamily family, std::vector<std::string> demos);

private:
    std::map<PromptFamily, std::vector<std::string>> demos_;
};

std::string instruction_text(PromptFamily family, std::size_t reference_count,
                             std::size_t relation_check_k = 3);

// Instruction as the system message; reference block, demonstrations and the
// live task as the user message. Families without a reference slot
// (path_generation, answering) ignore references. Deterministic.
std::vector<ChatMessage> render_prompt(PromptFamily family, std::span<const Reference> references,
                                       const PromptPayload& payload,
                                       const DemonstrationSet& demos, const ShotCounts& shots);

std::vector<ChatMessage> render_prompt(PromptFamily family, std::span<const Reference> references,
                                       const PromptPayload& payload);

// The "Here are N examples ..." block; empty string when there are no references.
std::string render_reference_block(PromptFamily family, std::span<const Reference> references);

bool has_reference_slot(PromptFamily family) noexcept;

struct PromptRecord {
    PromptFamily family = PromptFamily::answering;
    std::size_t reference_count = 0;  // references actually rendered

    friend bool operator==(const PromptRecord&, const PromptRecord&) = default;
};

// Renders prompts with the gateway's shot counts and sends them.
// Optionally notes every rendered prompt in a caller-owned log.
class Prompter {
public:
    Prompter(Gateway& gateway, const DemonstrationSet& demos,
             std::vector<PromptRecord>* log = nullptr)
        : gateway_(gateway), demos_(demos), log_(log) {}

    std::vector<ChatMessage> render(PromptFamily family, std::span<const Reference> references,
                                    const PromptPayload& payload) const;

    Gateway& gateway() const noexcept { return gateway_; }

private:
    Gateway& gateway_;
    const DemonstrationSet& demos_;
    std::vector<PromptRecord>* log_;
};

}  // namespace srp
