#ifndef XSTRAT_TOOLS_CLI_HPP
#define XSTRAT_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace xstrat::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kTimeout = 2 };

/// Runs the command line tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xstrat::cli

#endif
