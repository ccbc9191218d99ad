#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "httplib.h"

namespace srp::detail {

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string path;    // always starts with '/'
};

// Throws ArgumentError for anything that is not an http(s) URL.
UrlParts split_url(std::string_view url);

std::unique_ptr<httplib::Client> make_client(const UrlParts& url,
                                             std::chrono::milliseconds timeout);

std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);

}  // namespace srp::detail
