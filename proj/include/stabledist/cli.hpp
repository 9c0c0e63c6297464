#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stabledist {

// Exit codes of the stabledist executable.
enum ExitCode : int {
    kExitOk = 0,
    kExitParseError = 1,
    kExitInfeasible = 2,
    kExitMemoryRefusal = 3,
    kExitUnstable = 4,
};

// Runs one subcommand (solve, verify, bench, render, generate). `args`
// excludes the program name. Results that have no output file go to `out`;
// diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stabledist
