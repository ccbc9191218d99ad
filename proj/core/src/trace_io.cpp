#include <map>

#include "json_io.hpp"
#include "srp/orchestrator.hpp"
#include "srp/parsers.hpp"

namespace srp {

json parse_json(std::string_view text, std::size_t line) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        std::string where = line ? "line " + std::to_string(line) + ": " : "";
        throw ParseError(where + "invalid JSON", std::string(text), line);
    }
    return doc;
}

void to_json(json& j, const Triple& t) {
    j = json::array({t.head.str(), t.relation.str(), t.tail.str()});
}

void from_json(const json& j, Triple& t) {
    if (!j.is_array() || j.size() != 3) throw ParseError("triple must be a 3-element array");
    t = {EntityId(j[0].get<std::string>()), RelationId(j[1].get<std::string>()),
         EntityId(j[2].get<std::string>())};
}

void to_json(json& j, const TripletSequence& s) { j = s.triples; }
void from_json(const json& j, TripletSequence& s) { s.triples = j.get<std::vector<Triple>>(); }

void to_json(json& j, const ReasoningPath& p) {
    j = {{"start", p.start.str()}, {"relations", p.relations}};
}

void from_json(const json& j, ReasoningPath& p) {
    p.start = EntityId(j.at("start").get<std::string>());
    p.relations = j.at("relations").get<std::vector<std::string>>();
}

void to_json(json& j, const ScoredRelation& s) {
    j = {{"relation", s.relation.str()}, {"score", s.score}};
}

void from_json(const json& j, ScoredRelation& s) {
    s.relation = RelationId(j.at("relation").get<std::string>());
    s.score = j.at("score").get<double>();
}

void to_json(json& j, const Reference& r) {
    std::vector<std::string> paths;
    for (const auto& p : r.reasoning_paths) paths.push_back(to_arrow(p));
    j = {{"question", r.question}, {"paths", paths}, {"answers", r.answers}};
}

void from_json(const json& j, Reference& r) {
    r.question = j.at("question").get<std::string>();
    r.reasoning_paths.clear();
    for (const auto& p : j.at("paths")) r.reasoning_paths.push_back(parse_arrow(p.get<std::string>()));
    r.answers = j.at("answers").get<std::vector<std::string>>();
}

void to_json(json& j, const TopicEntity& e) { j = {{"id", e.id.str()}, {"label", e.label}}; }

void from_json(const json& j, TopicEntity& e) {
    if (j.is_string()) {
        e = {EntityId(j.get<std::string>()), {}};
        return;
    }
    e.id = EntityId(j.at("id").get<std::string>());
    e.label = j.value("label", "");
}

void to_json(json& j, const Question& q) {
    j = {{"id", q.id},
         {"question", q.text},
         {"topic_entities", q.topic_entities},
         {"answers", q.gold_answers}};
    if (!q.level.empty()) j["level"] = q.level;
}

void from_json(const json& j, Question& q) {
    q.id = j.value("id", "");
    q.text = j.at("question").get<std::string>();
    q.topic_entities = j.at("topic_entities").get<std::vector<TopicEntity>>();
    q.gold_answers = j.value("answers", std::vector<std::string>{});
    q.level = j.value("level", "");
}

namespace {

json instantiation_json(const InstantiationResult& r) {
    json candidates = json::object();
    for (const auto& [key, relations] : r.frontier_candidates) candidates[key] = relations;
    return {{"path", r.path},
            {"sequences", r.sequences},
            {"depth_reached", r.depth_reached},
            {"status", status_name(r.status)},
            {"error_messages", r.error_messages},
            {"frontier_candidates", candidates}};
}

InstantiationResult instantiation_from(const json& j) {
    InstantiationResult r;
    r.path = j.at("path").get<ReasoningPath>();
    r.sequences = j.at("sequences").get<std::vector<TripletSequence>>();
    r.depth_reached = j.at("depth_reached").get<std::size_t>();
    r.status = j.at("status").get<std::string>() == status_name(InstantiationStatus::fully_instantiated)
                   ? InstantiationStatus::fully_instantiated
                   : InstantiationStatus::partial;
    r.error_messages = j.at("error_messages").get<std::vector<std::string>>();
    for (const auto& [key, relations] : j.at("frontier_candidates").items()) {
        r.frontier_candidates[key] = relations.get<std::vector<RelationId>>();
    }
    return r;
}

json judgement_json(const Judgement& j) {
    return {{"verdict", verdict_name(j.verdict)},
            {"pruned", j.pruned},
            {"judge_message", j.judge_message},
            {"repaired", j.repaired}};
}

Judgement judgement_from(const json& j) {
    Judgement out;
    out.verdict = j.at("verdict").get<std::string>() == verdict_name(Verdict::have_answer)
                      ? Verdict::have_answer
                      : Verdict::no_answer;
    out.pruned = j.at("pruned").get<std::vector<TripletSequence>>();
    out.judge_message = j.at("judge_message").get<std::string>();
    out.repaired = j.at("repaired").get<bool>();
    return out;
}

template <class T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

}  // namespace

std::string trace_to_json(const RunTrace& t) {
    json checks = json::array();
    for (const auto& c : t.relation_checks) {
        checks.push_back({{"entity", c.entity.str()},
                          {"candidate_count", c.candidate_count},
                          {"checked_by_llm", c.checked_by_llm},
                          {"relations", c.relations},
                          {"error", c.error}});
    }
    json versions = json::array();
    for (const auto& v : t.path_versions) {
        versions.push_back({{"id", v.id},
                            {"parent", optional_json(v.parent)},
                            {"path", v.path},
                            {"arrow", to_arrow(v.path)},
                            {"off_plan", v.off_plan}});
    }
    json iterations = json::array();
    for (const auto& it : t.iterations) {
        json attempts = json::array();
        for (const auto& a : it.attempts) {
            attempts.push_back({{"version", a.version}, {"instantiation", instantiation_json(a.instantiation)}});
        }
        json edits = json::array();
        for (const auto& e : it.edits) {
            edits.push_back({{"from", e.from_version}, {"to", optional_json(e.to_version)}, {"error", e.error}});
        }
        iterations.push_back({{"index", it.index},
                              {"attempts", attempts},
                              {"judgement", judgement_json(it.judgement)},
                              {"judge_called", it.judge_called},
                              {"judge_error", it.judge_error},
                              {"contradiction", it.contradiction},
                              {"edits", edits}});
    }
    json labels = json::object();
    for (const auto& [id, label] : t.entity_labels) labels[id.str()] = label;
    json prompts = json::array();
    for (const auto& p : t.prompts) {
        prompts.push_back({{"family", family_name(p.family)}, {"reference_count", p.reference_count}});
    }
    json doc = {{"schema", kTraceSchema},
                {"question", t.question},
                {"reference_mode", t.reference_mode},
                {"references", t.references},
                {"relation_checks", checks},
                {"path_versions", versions},
                {"iterations", iterations},
                {"judge_calls", t.judge_calls},
                {"edits", t.edits},
                {"answer", {{"values", t.answer.values}, {"grounded", t.answer.grounded}, {"raw_text", t.answer.raw_text}}},
                {"answer_sequences", t.answer_sequences},
                {"searching_success", optional_json(t.searching_success)},
                {"terminal_state", terminal_name(t.terminal_state)},
                {"error", t.error},
                {"entity_labels", labels},
                {"prompts", prompts}};
    return doc.dump();
}

RunTrace trace_from_json(std::string_view text) {
    json doc = parse_json(text);
    try {
        if (doc.value("schema", "") != kTraceSchema) {
            throw ParseError("unsupported trace schema", std::string(text));
        }
        RunTrace t;
        t.question = doc.at("question").get<Question>();
        t.reference_mode = doc.at("reference_mode").get<std::string>();
        t.references = doc.at("references").get<std::vector<Reference>>();
        for (const auto& c : doc.at("relation_checks")) {
            t.relation_checks.push_back({EntityId(c.at("entity").get<std::string>()),
                                         c.at("candidate_count").get<std::size_t>(),
                                         c.at("checked_by_llm").get<bool>(),
                                         c.at("relations").get<std::vector<ScoredRelation>>(),
                                         c.at("error").get<std::string>()});
        }
        for (const auto& v : doc.at("path_versions")) {
            t.path_versions.push_back({v.at("id").get<std::size_t>(),
                                       optional_from<std::size_t>(v.at("parent")),
                                       v.at("path").get<ReasoningPath>(), v.at("off_plan").get<bool>()});
        }
        for (const auto& it : doc.at("iterations")) {
            IterationRecord rec;
            rec.index = it.at("index").get<std::size_t>();
            for (const auto& a : it.at("attempts")) {
                rec.attempts.push_back({a.at("version").get<std::size_t>(), instantiation_from(a.at("instantiation"))});
            }
            rec.judgement = judgement_from(it.at("judgement"));
            rec.judge_called = it.at("judge_called").get<bool>();
            rec.judge_error = it.at("judge_error").get<std::string>();
            rec.contradiction = it.at("contradiction").get<bool>();
            for (const auto& e : it.at("edits")) {
                rec.edits.push_back({e.at("from").get<std::size_t>(), optional_from<std::size_t>(e.at("to")),
                                     e.at("error").get<std::string>()});
            }
            t.iterations.push_back(std::move(rec));
        }
        t.judge_calls = doc.at("judge_calls").get<std::size_t>();
        t.edits = doc.at("edits").get<std::size_t>();
        const auto& a = doc.at("answer");
        t.answer = {a.at("values").get<std::vector<std::string>>(), a.at("grounded").get<bool>(),
                    a.at("raw_text").get<std::string>()};
        t.answer_sequences = doc.at("answer_sequences").get<std::vector<TripletSequence>>();
        t.searching_success = optional_from<bool>(doc.at("searching_success"));
        t.terminal_state = parse_terminal(doc.at("terminal_state").get<std::string>());
        t.error = doc.at("error").get<std::string>();
        for (const auto& [id, label] : doc.at("entity_labels").items()) {
            t.entity_labels[EntityId(id)] = label.get<std::string>();
        }
        for (const auto& p : doc.at("prompts")) {
            t.prompts.push_back({parse_family(p.at("family").get<std::string>()),
                                 p.at("reference_count").get<std::size_t>()});
        }
        return t;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed trace: ") + e.what(), std::string(text));
    }
}

}  // namespace srp
