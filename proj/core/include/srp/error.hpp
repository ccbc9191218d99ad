#pragma once

#include <stdexcept>
#include <string>

namespace srp {

// Root of every exception the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller violated a precondition (bad k, empty corpus, mismatched dimensions...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Configuration is inconsistent with the artifacts it is used with.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Input text (files or model output) did not match the expected grammar.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::string raw = {}, std::size_t line = 0);

    const std::string& raw() const noexcept { return raw_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string raw_;
    std::size_t line_;
};

// A remote knowledge-graph backend failed; carries what was asked of whom.
class BackendError : public Error {
public:
    BackendError(const std::string& message, std::string endpoint, std::string query);

    const std::string& endpoint() const noexcept { return endpoint_; }
    const std::string& query() const noexcept { return query_; }

private:
    std::string endpoint_;
    std::string query_;
};

// Embedding provider failure (remote service exhausted retries, bad payload).
class ProviderError : public Error {
public:
    using Error::Error;
};

// LLM access failed after retries. status is the last HTTP status, 0 for transport errors.
class GatewayError : public Error {
public:
    GatewayError(const std::string& message, int status = 0);
    int status() const noexcept { return status_; }

private:
    int status_;
};

// The LLM endpoint answered with something that is not a chat-completion document.
class ProtocolError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

// Raised by chat backends for failures worth retrying (timeouts, 429, 5xx).
class TransientError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

class PlanningError : public Error {
public:
    using Error::Error;
};

class ReflectionError : public Error {
public:
    using Error::Error;
};

}  // namespace srp
