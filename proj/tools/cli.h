#ifndef BALTOR_TOOLS_CLI_H_
#define BALTOR_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace baltor::cli {

// Exit codes of the baltor tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBoundViolated = 1;
inline constexpr int kExitMissingInput = 2;
inline constexpr int kExitEmptyCalibration = 3;
inline constexpr int kExitSchemaMismatch = 4;
inline constexpr int kExitOracleSize = 5;

// Runs the tool with `args` (without the program name). Normal output goes to
// `out`, diagnostics to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace baltor::cli

#endif  // BALTOR_TOOLS_CLI_H_
