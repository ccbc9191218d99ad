#include "sparql_server.hpp"

#include <regex>

#include "httplib.h"
#include "json.hpp"

namespace srp::testing {

using nlohmann::json;

namespace {

std::string decode(const std::string& ns, const std::string& iri) {
    auto id = local_id_from_iri(ns, iri);
    return id ? *id : std::string{};
}

json uri(const std::string& value) { return {{"type", "uri"}, {"value", value}}; }

json results(const std::string& var, const std::vector<json>& cells) {
    json rows = json::array();
    for (const auto& c : cells) rows.push_back({{var, c}});
    return {{"head", {{"vars", {var}}}}, {"results", {{"bindings", rows}}}};
}

}  // namespace

MockSparqlServer::MockSparqlServer(const TripleStore& store, std::string ns,
                                   std::string label_predicate)
    : store_(store),
      ns_(std::move(ns)),
      label_predicate_(std::move(label_predicate)),
      server_(std::make_unique<httplib::Server>()) {
    server_->new_task_queue = [] { return new httplib::ThreadPool(16); };
    server_->Get("/sparql", [this](const httplib::Request& req, httplib::Response& res) {
        ++requests_;
        const auto now = ++in_flight_;
        auto peak = peak_.load();
        while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
        }
        if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
        if (fail_status_ != 0) {
            res.status = fail_status_;
            res.set_content("unavailable", "text/plain");
        } else if (malformed_) {
            res.set_content("<html>not json</html>", "application/sparql-results+json");
        } else {
            res.set_content(answer(req.get_param_value("query")), "application/sparql-results+json");
        }
        --in_flight_;
    });
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

MockSparqlServer::~MockSparqlServer() {
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string MockSparqlServer::endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/sparql";
}

SparqlConfig MockSparqlServer::client_config() const {
    SparqlConfig config;
    config.endpoint = endpoint();
    config.entity_namespace = ns_;
    config.label_predicate = label_predicate_;
    config.timeout = std::chrono::milliseconds(5000);
    return config;
}

std::string MockSparqlServer::answer(const std::string& query) const {
    static const std::regex one_hop(R"(SELECT DISTINCT \?r WHERE \{ <([^>]*)> \?r \?t \. \})");
    static const std::regex successors(
        R"(SELECT DISTINCT \?t WHERE \{ <([^>]*)> <([^>]*)> \?t \. \})");
    static const std::regex label(R"(SELECT \?l WHERE \{ <([^>]*)> <([^>]*)> \?l \. \})");
    static const std::regex vocabulary(R"(SELECT DISTINCT \?r WHERE \{ \?s \?r \?o \. \})");

    std::smatch m;
    std::vector<json> cells;
    if (std::regex_match(query, m, one_hop)) {
        const EntityId e(decode(ns_, m[1].str()));
        for (const auto& r : store_.one_hop_relations(e)) cells.push_back(uri(entity_iri(ns_, r.str())));
        // Real endpoints also report the name predicate; the client must skip it.
        if (store_.label(e)) cells.push_back(uri(label_predicate_));
        return results("r", cells).dump();
    }
    if (std::regex_match(query, m, successors)) {
        const EntityId e(decode(ns_, m[1].str()));
        const RelationId r(decode(ns_, m[2].str()));
        for (const auto& t : store_.successors(e, r)) cells.push_back(uri(entity_iri(ns_, t.str())));
        return results("t", cells).dump();
    }
    if (std::regex_match(query, m, label)) {
        if (m[2].str() == label_predicate_) {
            if (auto l = store_.label(EntityId(decode(ns_, m[1].str())))) {
                cells.push_back({{"type", "literal"}, {"value", *l}, {"xml:lang", "en"}});
            }
        }
        return results("l", cells).dump();
    }
    if (std::regex_match(query, vocabulary)) {
        for (const auto& r : store_.relation_vocabulary()) cells.push_back(uri(entity_iri(ns_, r.str())));
        return results("r", cells).dump();
    }
    return results("x", {}).dump();
}

}  // namespace srp::testing
