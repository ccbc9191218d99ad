#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srp/error.hpp"

namespace srp {

enum class PromptFamily { relation_check, path_generation, sequence_judge, path_edit, answering };

std::string_view family_name(PromptFamily family);
PromptFamily parse_family(std::string_view name);

enum class Role { system, user, assistant };

std::string_view role_name(Role role);

struct ChatMessage {
    Role role = Role::user;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

// Few-shot demonstration counts per prompt family.
struct ShotCounts {
    std::size_t relation_check = 1;
    std::size_t path_generation = 3;
    std::size_t sequence_judge = 2;
    std::size_t path_edit = 5;
    std::size_t answering = 5;

    std::size_t of(PromptFamily family) const noexcept;
};

// "webqsp", "cwq" or "grailqa"; anything else is an ArgumentError.
ShotCounts shot_counts_for(std::string_view dataset);

struct LlmConfig {
    std::string endpoint;  // full chat-completions URL
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.3;
    int max_retries = 3;
    std::chrono::milliseconds timeout{60000};
    std::chrono::milliseconds backoff{500};  // doubled after each transient failure
    std::string api_key_env = "OPENAI_API_KEY";
    std::size_t max_in_flight = 4;
    std::size_t requests_per_minute = 0;  // 0 disables rate limiting
    ShotCounts shots;
    bool keep_call_log = false;
};

void validate(const LlmConfig& config);

// Who is asking. The scripted backend keys its replies on this.
struct CallContext {
    std::string question_id;
    PromptFamily family = PromptFamily::answering;
};

// One round trip to a chat model. Throws TransientError for retryable failures.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string send(const CallContext& context, std::span<const ChatMessage> messages,
                             const LlmConfig& config) = 0;
};

// OpenAI-compatible POST {model, messages, temperature} -> choices[0].message.content.
class OpenAiChatBackend final : public ChatBackend {
public:
    std::string send(const CallContext& context, std::span<const ChatMessage> messages,
                     const LlmConfig& config) override;
};

// Replays a script of {family, turn, response} entries. Turns count per
// (question, family) from 0; entries without a family count turns across all
// families of a question. Optional keys: "question" restricts an entry to
// one question id; "error" makes that turn fail transiently; a "turn" of "*"
// (or no turn) is the reply once the numbered turns run out.
class ScriptedChatBackend final : public ChatBackend {
public:
    struct Entry {
        std::optional<PromptFamily> family;  // nullopt matches any family
        std::optional<std::size_t> turn;     // nullopt is the fallback reply
        std::string question;                // empty matches any question
        std::string response;
        std::optional<std::string> error;
    };

    ScriptedChatBackend() = default;
    explicit ScriptedChatBackend(std::vector<Entry> entries);

    static std::vector<Entry> parse_script(std::string_view jsonl);
    static std::vector<Entry> load_script(const std::string& path);
    // Replies in call order regardless of family.
    static std::vector<Entry> sequential(std::vector<std::string> responses);

    std::string send(const CallContext& context, std::span<const ChatMessage> messages,
                     const LlmConfig& config) override;

    std::size_t calls(PromptFamily family) const;
    std::size_t total_calls() const;

private:
    const Entry* find(const CallContext& context, std::size_t turn, std::size_t global_turn) const;

    std::vector<Entry> entries_;
    mutable std::mutex mutex_;
    std::map<std::pair<std::string, PromptFamily>, std::size_t> turns_;
    std::map<std::string, std::size_t> global_turns_;
    std::map<PromptFamily, std::size_t> family_calls_;
};

struct CallRecord {
    CallContext context;
    std::vector<ChatMessage> messages;
    std::string response;
};

// Single entry point to the chat model: retries with exponential backoff,
// caps concurrent requests and enforces the per-minute rate limit.
class Gateway {
public:
    Gateway(std::shared_ptr<ChatBackend> backend, LlmConfig config);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    std::string complete(const CallContext& context, std::span<const ChatMessage> messages);

    // Completes and parses. On ParseError the conversation is extended with the
    // bad reply plus a corrective instruction and tried once more.
    template <class Parser>
    auto complete_parsed(const CallContext& context, std::vector<ChatMessage> messages,
                         Parser&& parse) -> decltype(parse(std::string{}));

    const LlmConfig& config() const noexcept { return config_; }
    std::vector<CallRecord> call_log() const;
    std::size_t call_count(PromptFamily family) const;

private:
    struct Limiter;

    std::shared_ptr<ChatBackend> backend_;
    LlmConfig config_;
    std::unique_ptr<Limiter> limiter_;
    mutable std::mutex log_mutex_;
    std::vector<CallRecord> log_;
    std::map<PromptFamily, std::size_t> counts_;
};

std::string corrective_instruction(const ParseError& error);

template <class Parser>
auto Gateway::complete_parsed(const CallContext& context, std::vector<ChatMessage> messages,
                              Parser&& parse) -> decltype(parse(std::string{})) {
    std::string reply = complete(context, messages);
    try {
        return parse(reply);
    } catch (const ParseError& error) {
        messages.push_back({Role::assistant, reply});
        messages.push_back({Role::user, corrective_instruction(error)});
    }
    return parse(complete(context, messages));
}

}  // namespace srp
