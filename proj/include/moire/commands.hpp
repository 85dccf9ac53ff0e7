#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "moire/config.hpp"

namespace moire {

struct CommandOptions {
    std::string out;  ///< empty writes to standard output
    int workers = 1;
};

std::vector<std::string> command_names();

/// Runs one command and writes its artifacts. Errors propagate as exceptions.
void run_command(const std::string& command, const RunConfig& cfg, const CommandOptions& opt, std::ostream& diag);

/// Exit status: 0 success, 2 invalid input, 3 numerical failure. Diagnostics go to diag.
int run(const std::string& command, const RunConfig& cfg, const CommandOptions& opt, std::ostream& diag);

/// Entry point of the moire-bands executable.
int cli_main(int argc, char** argv);

}  // namespace moire
