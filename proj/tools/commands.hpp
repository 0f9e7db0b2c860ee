#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace optstop::cli {

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kUsageError = 2 };

/// Command outcome: files written and whether every verdict passed.
struct CommandResult {
    std::vector<std::string> files;
    bool checks_passed = true;
};

CommandResult cmd_solve(const RunConfig& cfg, std::ostream& log);
CommandResult cmd_smoothfit(const RunConfig& cfg, std::ostream& log);
CommandResult cmd_regularity(const RunConfig& cfg, std::ostream& log);
CommandResult cmd_lagrange(const RunConfig& cfg, std::ostream& log);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace optstop::cli
