#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "srp/embeddings.hpp"
#include "srp/kg_store.hpp"
#include "srp/llm_gateway.hpp"
#include "srp/orchestrator.hpp"
#include "srp/prompts.hpp"
#include "srp/reference_base.hpp"
#include "srp/relation_index.hpp"

namespace srp::testing {

std::string data_path(const std::string& name);
std::string read_file(const std::string& path);

// The bundled toy graph with its relation vocabulary, reference base and the
// built-in demonstrations. Not movable: the index points at the provider.
struct ToyWorld {
    ToyWorld();
    explicit ToyWorld(std::unique_ptr<KnowledgeGraph> graph);

    std::unique_ptr<KnowledgeGraph> kg;
    HashingEmbedder provider;
    RelationCorpus index;
    ReferenceBase base;
    DemonstrationSet demos = DemonstrationSet::builtin();

    SrpDeps deps(Gateway& gateway, bool with_references = true) const;
};

const TripleStore& toy_store();

Question golden_question();

// Gateway settings that never sleep.
LlmConfig fast_llm_config();

struct ScriptedLlm {
    std::shared_ptr<ScriptedChatBackend> backend;
    std::unique_ptr<Gateway> gateway;
};

ScriptedLlm scripted(std::vector<ScriptedChatBackend::Entry> entries,
                     LlmConfig config = fast_llm_config());
ScriptedLlm scripted_file(const std::string& script_name, LlmConfig config = fast_llm_config());

ScriptedChatBackend::Entry reply(PromptFamily family, std::size_t turn, std::string response);
ScriptedChatBackend::Entry fallback(PromptFamily family, std::string response);

// The golden planning replies, a judge that never finds the answer and retains
// nothing, and edits that walk through distinct instantiable paths.
std::vector<ScriptedChatBackend::Entry> never_answers_script();

// A one-triple trace with gold "Answer <i>" and a chosen outcome: the first
// answer is gold when correct, the retrieved triple reaches the gold entity
// when search, answer_sequences holds that triple when in_pruned.
RunTrace synthetic_trace(std::size_t i, bool correct, bool search, bool in_pruned, bool grounded);

// Random graph with names e0.. and relations of the form dom_k.rel_k.
struct RandomGraph {
    TripleStore store;
    std::vector<EntityId> entities;
    std::vector<RelationId> relations;
};

RandomGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes = 30,
                         std::size_t max_relations = 8);

std::string random_word(std::mt19937_64& rng, std::size_t min_len = 3, std::size_t max_len = 8);

}  // namespace srp::testing
