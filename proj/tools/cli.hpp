#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phib::cli {

/// Runs one invocation (args excludes the program name). Exit codes:
/// 0 success, 1 bound/domain error or a failed check, 2 configuration or
/// usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phib::cli
