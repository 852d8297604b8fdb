#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wsym {

/// Runs one CLI invocation (args without the program name). Reports are
/// single JSON objects on `out`; diagnostics go to `err`. Exit codes:
/// 0 pass, 1 audit/check failure, 2 usage or input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsym
