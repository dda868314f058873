#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "dlt/transcript.hpp"

namespace dlt {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitNotMajorized = 2,
    kExitPlanFailure = 3,
};

struct CommandResult {
    int exit_code = kExitOk;
    Transcript transcript;
    /// One-line explanation for non-zero exits.
    std::string message;
};

CommandResult cmd_check(const ProblemSpec &spec);
CommandResult cmd_plan(const ProblemSpec &spec, std::size_t m = 3);
CommandResult cmd_simulate(
    const ProblemSpec &spec, std::uint64_t shots, std::uint64_t seed, unsigned threads = 0, std::size_t m = 3);
CommandResult cmd_demo_infeasible(const ProblemSpec &spec, std::size_t m);

std::string render_human(const CommandResult &result);
std::string render_machine(const CommandResult &result);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char *const *argv, std::istream &in, std::ostream &out, std::ostream &err);

}  // namespace dlt
