#include "srp/sparql.hpp"

#include <algorithm>
#include <semaphore>

#include "http_util.hpp"
#include "json.hpp"
#include "srp/error.hpp"

namespace srp {

using nlohmann::json;

std::string entity_iri(const std::string& ns, std::string_view local_id) {
    return ns + detail::percent_encode(local_id);
}

std::optional<std::string> local_id_from_iri(const std::string& ns, std::string_view iri) {
    if (iri.size() <= ns.size() || iri.substr(0, ns.size()) != ns) return std::nullopt;
    return detail::percent_decode(iri.substr(ns.size()));
}

namespace {

std::string bracket(const std::string& iri) { return "<" + iri + ">"; }

}  // namespace

std::string one_hop_query(const SparqlConfig& config, const EntityId& entity) {
    return "SELECT DISTINCT ?r WHERE { " +
           bracket(entity_iri(config.entity_namespace, entity.str())) + " ?r ?t . }";
}

std::string successors_query(const SparqlConfig& config, const EntityId& entity,
                             const RelationId& relation) {
    return "SELECT DISTINCT ?t WHERE { " +
           bracket(entity_iri(config.entity_namespace, entity.str())) + " " +
           bracket(entity_iri(config.entity_namespace, relation.str())) + " ?t . }";
}

std::string label_query(const SparqlConfig& config, const EntityId& entity) {
    return "SELECT ?l WHERE { " + bracket(entity_iri(config.entity_namespace, entity.str())) +
           " " + bracket(config.label_predicate) + " ?l . }";
}

std::string vocabulary_query() { return "SELECT DISTINCT ?r WHERE { ?s ?r ?o . }"; }

struct SparqlClient::Impl {
    explicit Impl(std::size_t cap)
        : in_flight(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(cap, 1, 1024))) {}

    std::counting_semaphore<1024> in_flight;
};

SparqlClient::SparqlClient(SparqlConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_.max_in_flight)) {
    detail::split_url(config_.endpoint);  // reject malformed endpoints up front
}

SparqlClient::~SparqlClient() = default;

namespace {

struct Binding {
    std::string type;
    std::string value;
    std::string lang;
};

std::vector<Binding> run_select(const SparqlConfig& config, std::counting_semaphore<1024>& gate,
                                const std::string& query, const std::string& var) {
    auto url = detail::split_url(config.endpoint);
    httplib::Result response;
    {
        gate.acquire();
        struct Release {
            std::counting_semaphore<1024>& g;
            ~Release() { g.release(); }
        } release{gate};
        auto client = detail::make_client(url, config.timeout);
        httplib::Params params{{"query", query}, {"format", "application/sparql-results+json"}};
        httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
        response = client->Get(url.path, params, headers);
    }
    if (!response) {
        throw BackendError("SPARQL request failed: " + httplib::to_string(response.error()),
                           config.endpoint, query);
    }
    if (response->status < 200 || response->status >= 300) {
        throw BackendError("SPARQL endpoint returned HTTP " + std::to_string(response->status),
                           config.endpoint, query);
    }
    json doc = json::parse(response->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("results") || !doc["results"].contains("bindings") ||
        !doc["results"]["bindings"].is_array()) {
        throw BackendError("malformed SPARQL JSON results", config.endpoint, query);
    }
    std::vector<Binding> out;
    for (const auto& row : doc["results"]["bindings"]) {
        if (!row.is_object() || !row.contains(var)) continue;
        const auto& cell = row[var];
        if (!cell.is_object() || !cell.contains("value") || !cell["value"].is_string()) {
            throw BackendError("malformed SPARQL binding", config.endpoint, query);
        }
        out.push_back({cell.value("type", ""), cell["value"].get<std::string>(),
                       cell.value("xml:lang", "")});
    }
    return out;
}

}  // namespace

std::set<RelationId> SparqlClient::one_hop_relations(const EntityId& entity) const {
    std::set<RelationId> out;
    for (const auto& b : run_select(config_, impl_->in_flight, one_hop_query(config_, entity), "r")) {
        if (b.type != "uri" || b.value == config_.label_predicate) continue;
        if (auto id = local_id_from_iri(config_.entity_namespace, b.value)) {
            out.insert(RelationId(std::move(*id)));
        }
    }
    return out;
}

std::vector<EntityId> SparqlClient::successors(const EntityId& entity,
                                               const RelationId& relation) const {
    std::set<EntityId> tails;
    for (const auto& b : run_select(config_, impl_->in_flight,
                                    successors_query(config_, entity, relation), "t")) {
        if (b.type != "uri") continue;
        if (auto id = local_id_from_iri(config_.entity_namespace, b.value)) {
            tails.insert(EntityId(std::move(*id)));
        }
    }
    return {tails.begin(), tails.end()};
}

std::optional<std::string> SparqlClient::label(const EntityId& entity) const {
    for (const auto& b : run_select(config_, impl_->in_flight, label_query(config_, entity), "l")) {
        if (b.type == "uri") continue;
        if (b.lang.empty() || b.lang == "en") return b.value;
    }
    return std::nullopt;
}

bool SparqlClient::is_cvt(const EntityId& entity) const {
    if (config_.cvt_marks.contains(entity)) return true;
    return looks_like_mid(entity.str()) && !label(entity).has_value();
}

std::vector<RelationId> SparqlClient::relation_vocabulary() const {
    std::set<RelationId> out;
    for (const auto& b : run_select(config_, impl_->in_flight, vocabulary_query(), "r")) {
        if (b.type != "uri" || b.value == config_.label_predicate) continue;
        if (auto id = local_id_from_iri(config_.entity_namespace, b.value)) {
            out.insert(RelationId(std::move(*id)));
        }
    }
    return {out.begin(), out.end()};
}

std::set<RelationId> sparql_one_hop_relations(const SparqlConfig& config, const EntityId& entity) {
    return SparqlClient(config).one_hop_relations(entity);
}

std::vector<EntityId> sparql_successors(const SparqlConfig& config, const EntityId& entity,
                                        const RelationId& relation) {
    return SparqlClient(config).successors(entity, relation);
}

}  // namespace srp
