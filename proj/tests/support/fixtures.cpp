#include "fixtures.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace srp::testing {

std::string data_path(const std::string& name) { return std::string(SRP_DATA_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const TripleStore& toy_store() {
    static const TripleStore store = load_triples_file(data_path("graph.tsv"));
    return store;
}

ToyWorld::ToyWorld() : ToyWorld(std::make_unique<TripleStore>(toy_store())) {}

ToyWorld::ToyWorld(std::unique_ptr<KnowledgeGraph> graph)
    : kg(std::move(graph)),
      provider(64, 0),
      index(load_relation_vocabulary(data_path("relations.txt")), provider),
      base(load_reference_base(data_path("refbase.jsonl"))) {}

SrpDeps ToyWorld::deps(Gateway& gateway, bool with_references) const {
    return SrpDeps{*kg, index, provider, with_references ? &base : nullptr, gateway, demos};
}

Question golden_question() {
    return Question{"film",
                    "what movie did carmen electra act in?",
                    {{EntityId("m.01lbp"), "carmen electra"}},
                    {"Naked Movie"},
                    {}};
}

LlmConfig fast_llm_config() {
    LlmConfig config;
    config.endpoint = "http://127.0.0.1:9/unused";
    config.backoff = std::chrono::milliseconds(0);
    config.keep_call_log = true;
    return config;
}

ScriptedLlm scripted(std::vector<ScriptedChatBackend::Entry> entries, LlmConfig config) {
    ScriptedLlm llm;
    llm.backend = std::make_shared<ScriptedChatBackend>(std::move(entries));
    llm.gateway = std::make_unique<Gateway>(llm.backend, std::move(config));
    return llm;
}

ScriptedLlm scripted_file(const std::string& script_name, LlmConfig config) {
    return scripted(ScriptedChatBackend::load_script(data_path(script_name)), std::move(config));
}

ScriptedChatBackend::Entry reply(PromptFamily family, std::size_t turn, std::string response) {
    ScriptedChatBackend::Entry e;
    e.family = family;
    e.turn = turn;
    e.response = std::move(response);
    return e;
}

ScriptedChatBackend::Entry fallback(PromptFamily family, std::string response) {
    ScriptedChatBackend::Entry e;
    e.family = family;
    e.response = std::move(response);
    return e;
}

std::vector<ScriptedChatBackend::Entry> never_answers_script() {
    auto film = ScriptedChatBackend::load_script(data_path("golden.script.jsonl"));
    std::vector<ScriptedChatBackend::Entry> out;
    for (auto& e : film) {
        if (e.family == PromptFamily::relation_check || e.family == PromptFamily::path_generation) {
            out.push_back(std::move(e));
        }
    }
    const char* const edits[] = {
        "carmen electra -> actor.film -> performance.film",
        "carmen electra -> person.place_of_birth",
        "carmen electra -> person.profession",
        "carmen electra -> person.place_of_birth -> location.containedby",
        "carmen electra -> appearing_in_film.film -> film_appearance.type",
        "carmen electra -> actor.film -> performance.film -> film.genre",
    };
    std::size_t turn = 0;
    for (const char* path : edits) {
        out.push_back(reply(PromptFamily::path_edit, turn++, std::string("Final Path: ") + path));
    }
    out.push_back(fallback(PromptFamily::sequence_judge,
                           "Thinking Process: nothing here answers the question. <NO_ANSWER>\n"
                           "Retained sequences:\n"));
    out.push_back(fallback(PromptFamily::answering, "From my own knowledge, the answer is {Scary Movie}."));
    return out;
}

std::string random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
    static constexpr char kLetters[] = "abcdefghijklmnopqrstuvwxyz";
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<std::size_t> letter(0, 25);
    std::string out(len(rng), 'a');
    for (auto& c : out) c = kLetters[letter(rng)];
    return out;
}

RandomGraph random_graph(std::mt19937_64& rng, std::size_t max_nodes, std::size_t max_relations) {
    std::uniform_int_distribution<std::size_t> n_nodes_d(4, max_nodes);
    std::uniform_int_distribution<std::size_t> n_rel_d(2, max_relations);
    const auto n_nodes = n_nodes_d(rng);
    const auto n_rel = n_rel_d(rng);

    RandomGraph g;
    for (std::size_t i = 0; i < n_nodes; ++i) g.entities.emplace_back("e" + std::to_string(i));
    std::set<std::string> names;
    while (names.size() < n_rel) names.insert(random_word(rng) + "." + random_word(rng));
    for (const auto& n : names) g.relations.emplace_back(n);

    std::uniform_int_distribution<std::size_t> node(0, n_nodes - 1);
    std::uniform_int_distribution<std::size_t> rel(0, n_rel - 1);
    std::uniform_int_distribution<std::size_t> n_edges_d(n_nodes, n_nodes * 3);
    std::vector<Triple> triples;
    for (std::size_t i = 0, n = n_edges_d(rng); i < n; ++i) {
        triples.push_back({g.entities[node(rng)], g.relations[rel(rng)], g.entities[node(rng)]});
    }
    g.store = TripleStore(std::move(triples));
    return g;
}

RunTrace synthetic_trace(std::size_t i, bool correct, bool search, bool in_pruned, bool grounded) {
    RunTrace t;
    const std::string gold = "Answer " + std::to_string(i);
    t.question = {"q" + std::to_string(i), "question " + std::to_string(i),
                  {{EntityId("m.start"), "start"}}, {gold}, {}};
    const EntityId hit("m.hit" + std::to_string(i));
    const EntityId miss("m.miss" + std::to_string(i));
    const Triple found{EntityId("m.start"), RelationId("r.to"), search ? hit : miss};
    t.entity_labels[hit] = gold;
    t.entity_labels[miss] = "Something Else";
    IterationRecord it;
    InstantiationResult inst;
    inst.sequences = {TripletSequence{{found}}};
    it.attempts.push_back({0, inst});
    t.iterations.push_back(it);
    t.answer = {{correct ? gold : "Wrong"}, grounded, ""};
    if (in_pruned) t.answer_sequences = {TripletSequence{{found}}};
    t.terminal_state = TerminalState::answered;
    return t;
}

}  // namespace srp::testing
