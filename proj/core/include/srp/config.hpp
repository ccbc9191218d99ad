#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "srp/embeddings.hpp"
#include "srp/kg_store.hpp"
#include "srp/llm_gateway.hpp"
#include "srp/orchestrator.hpp"
#include "srp/prompts.hpp"
#include "srp/reference_base.hpp"
#include "srp/relation_index.hpp"

namespace srp {

// "key = value" lines, '#' comments. Every key may be overridden by an
// environment variable SRP_<KEY> with dots turned into underscores
// (llm.model -> SRP_LLM_MODEL). Relative paths resolve against the file's
// directory.
class ConfigFile {
public:
    ConfigFile() = default;

    static ConfigFile parse(std::string_view text, std::filesystem::path base_dir = {});
    static ConfigFile load(const std::filesystem::path& path);

    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    // A path value resolved against the config file's directory.
    std::optional<std::filesystem::path> get_path(const std::string& key) const;

    void set(const std::string& key, std::string value);
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::filesystem::path base_dir_;
};

// Everything answer_question needs, built from a config file.
//
//   kg.backend = memory | sparql      kg.triples, kg.sparql_endpoint,
//   kg.namespace, kg.label_predicate, kg.relations, kg.max_in_flight
//   embed.provider = hashing | remote embed.dimension, embed.seed, embed.endpoint
//   llm.provider = mock | openai      llm.script, llm.endpoint, llm.model,
//   llm.temperature, llm.max_retries, llm.timeout_ms, llm.backoff_ms,
//   llm.api_key_env, llm.max_in_flight, llm.requests_per_minute
//   refs.base                         reference base file (optional)
//   prompts.dataset, prompts.demos_dir
//   srp.k_references, srp.relation_check_k, srp.top_n_similar, srp.fanout_cap,
//   srp.max_reflections, srp.candidate_cap, srp.lexical_weight, srp.seed, srp.ablate
struct Runtime {
    std::unique_ptr<KnowledgeGraph> kg;
    std::unique_ptr<EmbeddingProvider> provider;
    std::unique_ptr<RelationCorpus> index;
    std::optional<ReferenceBase> base;
    std::unique_ptr<Gateway> gateway;
    DemonstrationSet demos;
    SrpConfig srp;

    SrpDeps deps() const;
};

SrpConfig srp_config_from(const ConfigFile& config);
LlmConfig llm_config_from(const ConfigFile& config);
std::unique_ptr<EmbeddingProvider> provider_from(const ConfigFile& config);
std::unique_ptr<KnowledgeGraph> knowledge_graph_from(const ConfigFile& config);

Runtime build_runtime(const ConfigFile& config);

}  // namespace srp
