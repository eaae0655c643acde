#pragma once

#include <ostream>

namespace cyclorank {

inline constexpr const char* kDbEnv = "CYCLORANK_DB";
inline constexpr const char* kEndpointEnv = "CYCLORANK_ENDPOINT";

// Exit codes: 0 success, 1 usage error, 2 computation error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cyclorank
