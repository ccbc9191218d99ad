#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "srp/kg_store.hpp"

namespace srp {

struct SparqlConfig {
    std::string endpoint;  // e.g. http://localhost:8890/sparql
    std::string entity_namespace = "http://rdf.freebase.com/ns/";
    std::string label_predicate = "http://rdf.freebase.com/ns/type.object.name";
    std::chrono::milliseconds timeout{10000};
    std::size_t max_in_flight = 8;
    std::set<EntityId> cvt_marks;
};

// Local ids are percent-encoded into IRIs under the configured namespace, so
// toy-graph names with spaces survive the trip.
std::string entity_iri(const std::string& ns, std::string_view local_id);
std::optional<std::string> local_id_from_iri(const std::string& ns, std::string_view iri);

std::string one_hop_query(const SparqlConfig& config, const EntityId& entity);
std::string successors_query(const SparqlConfig& config, const EntityId& entity,
                             const RelationId& relation);
std::string label_query(const SparqlConfig& config, const EntityId& entity);
std::string vocabulary_query();

// SPARQL 1.1 protocol client (GET, JSON results). Stateless per request;
// concurrent calls are capped at max_in_flight. Failures throw BackendError.
class SparqlClient final : public KnowledgeGraph {
public:
    explicit SparqlClient(SparqlConfig config);
    ~SparqlClient() override;

    std::set<RelationId> one_hop_relations(const EntityId& entity) const override;
    std::vector<EntityId> successors(const EntityId& entity,
                                     const RelationId& relation) const override;
    std::optional<std::string> label(const EntityId& entity) const override;
    bool is_cvt(const EntityId& entity) const override;

    // Every relation used by any triple in the namespace, sorted.
    std::vector<RelationId> relation_vocabulary() const;

    const SparqlConfig& config() const noexcept { return config_; }

private:
    struct Impl;
    SparqlConfig config_;
    std::unique_ptr<Impl> impl_;
};

// Free-function forms of the client calls.
std::set<RelationId> sparql_one_hop_relations(const SparqlConfig& config, const EntityId& entity);
std::vector<EntityId> sparql_successors(const SparqlConfig& config, const EntityId& entity,
                                        const RelationId& relation);

}  // namespace srp
