#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ess::cli {

/// Runs the `ess` command line. `args` excludes the program name. Machine
/// readable output goes to `out`; logs, warnings and the effective
/// configuration go to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ess::cli
