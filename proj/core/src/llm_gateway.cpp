#include "srp/llm_gateway.hpp"

#include <cstdlib>
#include <deque>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <thread>

#include "http_util.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace srp {

using nlohmann::json;

std::string_view family_name(PromptFamily family) {
    switch (family) {
        case PromptFamily::relation_check: return "relation_check";
        case PromptFamily::path_generation: return "path_generation";
        case PromptFamily::sequence_judge: return "sequence_judge";
        case PromptFamily::path_edit: return "path_edit";
        case PromptFamily::answering: return "answering";
    }
    return "unknown";
}

PromptFamily parse_family(std::string_view name) {
    for (auto f : {PromptFamily::relation_check, PromptFamily::path_generation,
                   PromptFamily::sequence_judge, PromptFamily::path_edit, PromptFamily::answering}) {
        if (family_name(f) == name) return f;
    }
    throw ArgumentError("unknown prompt family: " + std::string(name));
}

std::string_view role_name(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

std::size_t ShotCounts::of(PromptFamily family) const noexcept {
    switch (family) {
        case PromptFamily::relation_check: return relation_check;
        case PromptFamily::path_generation: return path_generation;
        case PromptFamily::sequence_judge: return sequence_judge;
        case PromptFamily::path_edit: return path_edit;
        case PromptFamily::answering: return answering;
    }
    return 0;
}

ShotCounts shot_counts_for(std::string_view dataset) {
    const auto name = detail::to_lower_ascii(dataset);
    if (name == "webqsp") return {1, 3, 2, 5, 5};
    if (name == "cwq") return {1, 4, 2, 5, 5};
    if (name == "grailqa") return {1, 4, 2, 4, 5};
    throw ArgumentError("unknown dataset for shot counts: " + std::string(dataset));
}

void validate(const LlmConfig& config) {
    if (config.temperature < 0.0) throw ConfigError("temperature must be >= 0");
    if (config.max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (config.max_in_flight == 0) throw ConfigError("max_in_flight must be positive");
}

std::string OpenAiChatBackend::send(const CallContext& /*context*/,
                                    std::span<const ChatMessage> messages,
                                    const LlmConfig& config) {
    if (config.endpoint.empty()) throw GatewayError("no chat endpoint configured");
    auto url = detail::split_url(config.endpoint);
    json body = {{"model", config.model}, {"temperature", config.temperature}};
    body["messages"] = json::array();
    for (const auto& m : messages) {
        body["messages"].push_back({{"role", role_name(m.role)}, {"content", m.content}});
    }
    httplib::Headers headers;
    if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto client = detail::make_client(url, config.timeout);
    auto response = client->Post(url.path, headers, body.dump(), "application/json");
    if (!response) {
        throw TransientError("chat request failed: " + httplib::to_string(response.error()), 0);
    }
    const int status = response->status;
    if (status == 429 || status >= 500) {
        throw TransientError("chat endpoint returned HTTP " + std::to_string(status), status);
    }
    if (status < 200 || status >= 300) {
        throw GatewayError("chat endpoint returned HTTP " + std::to_string(status), status);
    }
    json doc = json::parse(response->body, nullptr, false);
    if (doc.is_discarded()) throw ProtocolError("chat endpoint returned a non-JSON body", status);
    try {
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw ProtocolError("chat response has no choices[0].message.content", status);
    }
}

ScriptedChatBackend::ScriptedChatBackend(std::vector<Entry> entries) : entries_(std::move(entries)) {}

std::vector<ScriptedChatBackend::Entry> ScriptedChatBackend::parse_script(std::string_view jsonl) {
    std::vector<Entry> entries;
    std::size_t line_no = 0;
    for (auto line : detail::split_lines(jsonl)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object()) {
            throw ParseError("mock script line " + std::to_string(line_no) + " is not a JSON object",
                             std::string(line), line_no);
        }
        Entry e;
        try {
            if (row.contains("family") && !row["family"].is_null() && row["family"] != "*") {
                e.family = parse_family(row["family"].get<std::string>());
            }
            if (row.contains("turn") && row["turn"].is_number_unsigned()) {
                e.turn = row["turn"].get<std::size_t>();
            } else if (row.contains("turn") && !(row["turn"].is_string() && row["turn"] == "*")) {
                throw ParseError("turn must be a non-negative integer or \"*\"");
            }
            e.question = row.value("question", "");
            e.response = row.value("response", "");
            if (row.contains("error")) e.error = row["error"].get<std::string>();
        } catch (const json::exception& ex) {
            throw ParseError("mock script line " + std::to_string(line_no) + ": " + ex.what(),
                             std::string(line), line_no);
        } catch (const ArgumentError& ex) {
            throw ParseError("mock script line " + std::to_string(line_no) + ": " + ex.what(),
                             std::string(line), line_no);
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<ScriptedChatBackend::Entry> ScriptedChatBackend::load_script(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open mock script: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_script(buffer.str());
}

std::vector<ScriptedChatBackend::Entry> ScriptedChatBackend::sequential(
    std::vector<std::string> responses) {
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        entries.push_back({std::nullopt, i, {}, std::move(responses[i]), std::nullopt});
    }
    return entries;
}

const ScriptedChatBackend::Entry* ScriptedChatBackend::find(const CallContext& context,
                                                            std::size_t turn,
                                                            std::size_t global_turn) const {
    enum class Scope { exact_question, any_question };
    auto match = [&](Scope scope, bool by_family, bool numbered) -> const Entry* {
        for (const auto& e : entries_) {
            if (scope == Scope::exact_question ? e.question != context.question_id
                                               : !e.question.empty()) {
                continue;
            }
            if (by_family ? e.family != context.family : e.family.has_value()) continue;
            if (numbered) {
                if (e.turn != (by_family ? turn : global_turn)) continue;
            } else if (e.turn.has_value()) {
                continue;
            }
            return &e;
        }
        return nullptr;
    };
    for (bool numbered : {true, false}) {
        for (bool by_family : {true, false}) {
            for (auto scope : {Scope::exact_question, Scope::any_question}) {
                if (scope == Scope::exact_question && context.question_id.empty()) continue;
                if (const Entry* e = match(scope, by_family, numbered)) return e;
            }
        }
    }
    return nullptr;
}

std::string ScriptedChatBackend::send(const CallContext& context,
                                      std::span<const ChatMessage> /*messages*/,
                                      const LlmConfig& /*config*/) {
    std::lock_guard lock(mutex_);
    const std::size_t turn = turns_[{context.question_id, context.family}]++;
    const std::size_t global_turn = global_turns_[context.question_id]++;
    ++family_calls_[context.family];
    const Entry* entry = find(context, turn, global_turn);
    if (!entry) {
        throw GatewayError("mock script has no reply for " + std::string(family_name(context.family)) +
                           " turn " + std::to_string(turn) +
                           (context.question_id.empty() ? "" : " of question " + context.question_id));
    }
    if (entry->error) throw TransientError("scripted failure: " + *entry->error, 503);
    return entry->response;
}

std::size_t ScriptedChatBackend::calls(PromptFamily family) const {
    std::lock_guard lock(mutex_);
    auto it = family_calls_.find(family);
    return it == family_calls_.end() ? 0 : it->second;
}

std::size_t ScriptedChatBackend::total_calls() const {
    std::lock_guard lock(mutex_);
    std::size_t total = 0;
    for (const auto& [family, n] : family_calls_) total += n;
    return total;
}

struct Gateway::Limiter {
    explicit Limiter(const LlmConfig& config)
        : slots(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config.max_in_flight, 1, 1024))),
          per_minute(config.requests_per_minute) {}

    // Blocks until a request may start under the per-minute budget.
    void wait_for_rate() {
        if (per_minute == 0) return;
        std::unique_lock lock(mutex);
        while (true) {
            const auto now = std::chrono::steady_clock::now();
            while (!starts.empty() && now - starts.front() >= std::chrono::minutes(1)) {
                starts.pop_front();
            }
            if (starts.size() < per_minute) {
                starts.push_back(now);
                return;
            }
            const auto wake = starts.front() + std::chrono::minutes(1);
            lock.unlock();
            std::this_thread::sleep_until(wake);
            lock.lock();
        }
    }

    std::counting_semaphore<1024> slots;
    std::size_t per_minute;
    std::mutex mutex;
    std::deque<std::chrono::steady_clock::time_point> starts;
};

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, LlmConfig config)
    : backend_(std::move(backend)), config_(std::move(config)) {
    if (!backend_) throw ArgumentError("gateway needs a chat backend");
    validate(config_);
    limiter_ = std::make_unique<Limiter>(config_);
}

Gateway::~Gateway() = default;

std::string Gateway::complete(const CallContext& context, std::span<const ChatMessage> messages) {
    if (messages.empty()) throw ArgumentError("complete called without messages");
    for (const auto& m : messages) {
        if (m.role == Role::user && m.content.empty()) {
            throw ArgumentError("user message with empty content");
        }
    }
    std::string last_error;
    int last_status = 0;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0 && config_.backoff.count() > 0) {
            std::this_thread::sleep_for(config_.backoff * (1LL << std::min(attempt - 1, 16)));
        }
        limiter_->wait_for_rate();
        limiter_->slots.acquire();
        std::string reply;
        try {
            reply = backend_->send(context, messages, config_);
        } catch (const TransientError& e) {
            limiter_->slots.release();
            last_error = e.what();
            last_status = e.status();
            continue;
        } catch (...) {
            limiter_->slots.release();
            throw;
        }
        limiter_->slots.release();
        std::lock_guard lock(log_mutex_);
        ++counts_[context.family];
        if (config_.keep_call_log) {
            log_.push_back({context, std::vector<ChatMessage>(messages.begin(), messages.end()), reply});
        }
        return reply;
    }
    throw GatewayError("LLM request failed after " + std::to_string(config_.max_retries + 1) +
                           " attempts: " + last_error,
                       last_status);
}

std::vector<CallRecord> Gateway::call_log() const {
    std::lock_guard lock(log_mutex_);
    return log_;
}

std::size_t Gateway::call_count(PromptFamily family) const {
    std::lock_guard lock(log_mutex_);
    auto it = counts_.find(family);
    return it == counts_.end() ? 0 : it->second;
}

std::string corrective_instruction(const ParseError& error) {
    return std::string("Your previous reply could not be used (") + error.what() +
           "). Reply again and follow the required output format exactly.";
}

}  // namespace srp
