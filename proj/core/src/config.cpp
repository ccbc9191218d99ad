#include "srp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "srp/error.hpp"
#include "srp/sparql.hpp"
#include "text_util.hpp"

namespace srp {

namespace {

std::string env_name(const std::string& key) {
    std::string name = "SRP_";
    for (char c : key) {
        name += (c == '.' || c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return name;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, std::filesystem::path base_dir) {
    ConfigFile config;
    config.base_dir_ = std::move(base_dir);
    std::size_t line_no = 0;
    for (auto raw : detail::split_lines(text)) {
        ++line_no;
        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("config line without '='", std::string(raw), line_no);
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError("config line without a key", std::string(raw), line_no);
        config.values_[key] = std::string(detail::trim(line.substr(eq + 1)));
    }
    return config;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.parent_path());
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
    if (const char* env = std::getenv(env_name(key).c_str())) return std::string(env);
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string ConfigFile::get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

std::size_t ConfigFile::get_size(const std::string& key, std::size_t fallback) const {
    auto value = get(key);
    if (!value) return fallback;
    try {
        std::size_t used = 0;
        if (!value->empty() && value->front() == '-') throw std::invalid_argument("negative");
        auto n = std::stoull(*value, &used);
        if (used != value->size()) throw std::invalid_argument("trailing text");
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw ConfigError(key + " must be a non-negative integer, got '" + *value + "'");
    }
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    auto value = get(key);
    if (!value) return fallback;
    try {
        std::size_t used = 0;
        double d = std::stod(*value, &used);
        if (used != value->size()) throw std::invalid_argument("trailing text");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + " must be a number, got '" + *value + "'");
    }
}

std::optional<std::filesystem::path> ConfigFile::get_path(const std::string& key) const {
    auto value = get(key);
    if (!value || value->empty()) return std::nullopt;
    std::filesystem::path p(*value);
    if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
    return p;
}

void ConfigFile::set(const std::string& key, std::string value) { values_[key] = std::move(value); }

SrpDeps Runtime::deps() const {
    return SrpDeps{*kg, *index, *provider, base ? &*base : nullptr, *gateway, demos};
}

SrpConfig srp_config_from(const ConfigFile& config) {
    SrpConfig srp;
    srp.k_references = config.get_size("srp.k_references", srp.k_references);
    srp.relation_check_k = config.get_size("srp.relation_check_k", srp.relation_check_k);
    srp.top_n_similar = config.get_size("srp.top_n_similar", srp.top_n_similar);
    srp.fanout_cap = config.get_size("srp.fanout_cap", srp.fanout_cap);
    srp.max_reflections = config.get_size("srp.max_reflections", srp.max_reflections);
    srp.candidate_cap = config.get_size("srp.candidate_cap", srp.candidate_cap);
    srp.lexical_weight = config.get_double("srp.lexical_weight", srp.lexical_weight);
    srp.seed = config.get_size("srp.seed", srp.seed);
    try {
        srp.ablations = parse_ablations(config.get_or("srp.ablate", ""));
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("srp.ablate: ") + e.what());
    }
    validate(srp);
    return srp;
}

LlmConfig llm_config_from(const ConfigFile& config) {
    LlmConfig llm;
    llm.endpoint = config.get_or("llm.endpoint", "https://api.openai.com/v1/chat/completions");
    llm.model = config.get_or("llm.model", llm.model);
    llm.temperature = config.get_double("llm.temperature", llm.temperature);
    llm.max_retries = static_cast<int>(config.get_size("llm.max_retries", 3));
    llm.timeout = std::chrono::milliseconds(config.get_size("llm.timeout_ms", 60000));
    llm.backoff = std::chrono::milliseconds(config.get_size("llm.backoff_ms", 500));
    llm.api_key_env = config.get_or("llm.api_key_env", llm.api_key_env);
    llm.max_in_flight = config.get_size("llm.max_in_flight", llm.max_in_flight);
    llm.requests_per_minute = config.get_size("llm.requests_per_minute", 0);
    if (auto dataset = config.get("prompts.dataset")) llm.shots = shot_counts_for(*dataset);
    llm.keep_call_log = config.get_or("llm.keep_call_log", "false") == "true";
    validate(llm);
    return llm;
}

std::unique_ptr<EmbeddingProvider> provider_from(const ConfigFile& config) {
    const auto kind = config.get_or("embed.provider", "hashing");
    if (kind == "hashing") {
        return std::make_unique<HashingEmbedder>(config.get_size("embed.dimension", 64),
                                                 config.get_size("embed.seed", 0));
    }
    if (kind == "remote") {
        RemoteEmbedderConfig remote;
        remote.endpoint = config.get_or("embed.endpoint", "");
        if (remote.endpoint.empty()) throw ConfigError("embed.endpoint is required for remote");
        remote.dimension = config.get_size("embed.dimension", remote.dimension);
        remote.model = config.get_or("embed.model", remote.model);
        return std::make_unique<RemoteEmbedder>(remote);
    }
    throw ConfigError("unknown embed.provider: " + kind);
}

std::unique_ptr<KnowledgeGraph> knowledge_graph_from(const ConfigFile& config) {
    const auto kind = config.get_or("kg.backend", "memory");
    if (kind == "memory") {
        auto path = config.get_path("kg.triples");
        if (!path) throw ConfigError("kg.triples is required for the memory backend");
        return std::make_unique<TripleStore>(load_triples_file(path->string()));
    }
    if (kind == "sparql") {
        SparqlConfig sparql;
        sparql.endpoint = config.get_or("kg.sparql_endpoint", "");
        if (sparql.endpoint.empty()) throw ConfigError("kg.sparql_endpoint is required");
        sparql.entity_namespace = config.get_or("kg.namespace", sparql.entity_namespace);
        sparql.label_predicate = config.get_or("kg.label_predicate", sparql.label_predicate);
        sparql.max_in_flight = config.get_size("kg.max_in_flight", sparql.max_in_flight);
        sparql.timeout = std::chrono::milliseconds(config.get_size("kg.timeout_ms", 10000));
        return std::make_unique<SparqlClient>(sparql);
    }
    throw ConfigError("unknown kg.backend: " + kind);
}

Runtime build_runtime(const ConfigFile& config) {
    Runtime rt;
    rt.srp = srp_config_from(config);
    rt.kg = knowledge_graph_from(config);
    rt.provider = provider_from(config);

    std::vector<RelationId> vocabulary;
    if (auto path = config.get_path("kg.relations")) {
        vocabulary = load_relation_vocabulary(path->string());
    } else if (auto* store = dynamic_cast<const TripleStore*>(rt.kg.get())) {
        vocabulary = store->relation_vocabulary();
    } else if (auto* client = dynamic_cast<const SparqlClient*>(rt.kg.get())) {
        vocabulary = client->relation_vocabulary();
    }
    rt.index = std::make_unique<RelationCorpus>(std::move(vocabulary), *rt.provider);

    if (auto path = config.get_path("refs.base")) rt.base = load_reference_base(path->string());

    auto llm = llm_config_from(config);
    const auto kind = config.get_or("llm.provider", "mock");
    std::shared_ptr<ChatBackend> backend;
    if (kind == "mock") {
        auto script = config.get_path("llm.script");
        if (!script) throw ConfigError("llm.script is required for the mock provider");
        backend = std::make_shared<ScriptedChatBackend>(
            ScriptedChatBackend::load_script(script->string()));
    } else if (kind == "openai") {
        backend = std::make_shared<OpenAiChatBackend>();
    } else {
        throw ConfigError("unknown llm.provider: " + kind);
    }
    rt.gateway = std::make_unique<Gateway>(std::move(backend), std::move(llm));

    if (auto dir = config.get_path("prompts.demos_dir")) {
        rt.demos = DemonstrationSet::load(dir->string());
    } else {
        rt.demos = DemonstrationSet::builtin();
    }
    return rt;
}

}  // namespace srp
