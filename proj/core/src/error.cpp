#include "srp/error.hpp"

namespace srp {

ParseError::ParseError(const std::string& message, std::string raw, std::size_t line)
    : Error(message), raw_(std::move(raw)), line_(line) {}

BackendError::BackendError(const std::string& message, std::string endpoint, std::string query)
    : Error(message), endpoint_(std::move(endpoint)), query_(std::move(query)) {}

GatewayError::GatewayError(const std::string& message, int status)
    : Error(message), status_(status) {}

}  // namespace srp
