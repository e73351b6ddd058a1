#ifndef TWOSTREAM_TOOLS_CLI_HPP_
#define TWOSTREAM_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace twostream::cli {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;

// Runs one command line (args[0] is the program name). Normal output goes
// to `out`, diagnostics to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace twostream::cli

#endif  // TWOSTREAM_TOOLS_CLI_HPP_
