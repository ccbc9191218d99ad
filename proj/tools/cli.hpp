#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace srp::cli {

// Exit codes of the srp tool.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;
inline constexpr int kPipelineFailure = 3;

// Runs one invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srp::cli
