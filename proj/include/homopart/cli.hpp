#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace homopart {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerification = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Returns 0 on success, 1 when an audit
/// or verification fails, 2 on usage or input errors.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace homopart
