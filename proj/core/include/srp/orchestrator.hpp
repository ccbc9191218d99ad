#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srp/embeddings.hpp"
#include "srp/kg_store.hpp"
#include "srp/llm_gateway.hpp"
#include "srp/planner.hpp"
#include "srp/prompts.hpp"
#include "srp/reference_base.hpp"
#include "srp/reflector.hpp"
#include "srp/relation_index.hpp"
#include "srp/retriever.hpp"

namespace srp {

struct Ablations {
    bool no_relation_check = false;
    bool no_reflection = false;
    bool no_reference = false;
    bool random_reference = false;

    friend bool operator==(const Ablations&, const Ablations&) = default;
};

// Comma-separated: no-relation-check,no-reflection,no-reference,random-reference.
Ablations parse_ablations(std::string_view flags);
std::string format_ablations(const Ablations& ablations);

struct SrpConfig {
    std::size_t k_references = 4;
    std::size_t relation_check_k = 3;
    std::size_t top_n_similar = 5;
    std::size_t fanout_cap = 10;
    std::size_t max_reflections = 3;
    std::size_t candidate_cap = 60;
    double lexical_weight = 0.5;
    std::uint64_t seed = 0;
    Ablations ablations;
};

void validate(const SrpConfig& config);

struct SrpDeps {
    const KnowledgeGraph& kg;
    const RelationCorpus& index;
    const EmbeddingProvider& provider;
    const ReferenceBase* base;  // null: run without references
    Gateway& gateway;
    const DemonstrationSet& demos;
};

enum class TerminalState { answered, budget_exhausted, planning_failed, failed };

std::string_view terminal_name(TerminalState state);
TerminalState parse_terminal(std::string_view name);

struct RelationCheckRecord {
    EntityId entity;
    std::size_t candidate_count = 0;
    bool checked_by_llm = false;
    std::vector<ScoredRelation> relations;
    std::string error;

    friend bool operator==(const RelationCheckRecord&, const RelationCheckRecord&) = default;
};

struct PathVersion {
    std::size_t id = 0;
    std::optional<std::size_t> parent;
    ReasoningPath path;
    bool off_plan = false;

    friend bool operator==(const PathVersion&, const PathVersion&) = default;
};

struct PathAttempt {
    std::size_t version = 0;
    InstantiationResult instantiation;

    friend bool operator==(const PathAttempt&, const PathAttempt&) = default;
};

struct EditRecord {
    std::size_t from_version = 0;
    std::optional<std::size_t> to_version;  // nullopt: the path was retired
    std::string error;

    friend bool operator==(const EditRecord&, const EditRecord&) = default;
};

struct IterationRecord {
    std::size_t index = 0;
    std::vector<PathAttempt> attempts;
    Judgement judgement;
    bool judge_called = false;   // false when there was nothing to judge
    std::string judge_error;     // judge failed; treated as NO_ANSWER, unpruned
    bool contradiction = false;  // HAVE_ANSWER with nothing retained
    std::vector<EditRecord> edits;

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

inline constexpr std::string_view kTraceSchema = "srp.trace/1";

struct RunTrace {
    Question question;
    std::string reference_mode;  // searched | random | none
    std::vector<Reference> references;
    std::vector<RelationCheckRecord> relation_checks;
    std::vector<PathVersion> path_versions;
    std::vector<IterationRecord> iterations;
    std::size_t judge_calls = 0;
    std::size_t edits = 0;
    Answer answer;
    std::vector<TripletSequence> answer_sequences;  // retained sequences the answer used
    std::optional<bool> searching_success;          // needs gold answers
    TerminalState terminal_state = TerminalState::failed;
    std::string error;
    std::map<EntityId, std::string> entity_labels;  // labels of every retrieved entity
    std::vector<PromptRecord> prompts;

    // Every triple retrieved in any iteration, in trace order.
    std::vector<Triple> retrieved_triples() const;

    friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

// Runs the whole loop for one question. Only answering-stage gateway
// failures escape; planning trouble ends in planning_failed.
RunTrace answer_question(const Question& question, const SrpConfig& config, const SrpDeps& deps);

std::string trace_to_json(const RunTrace& trace);
RunTrace trace_from_json(std::string_view text);

}  // namespace srp
