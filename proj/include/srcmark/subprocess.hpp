#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srcmark/error.hpp"

namespace srcmark {

struct RunResult {
    int exit_code = -1;
    std::string output;
    std::string error_output;
};

struct RunOptions {
    std::optional<std::string> cwd;
    std::vector<std::pair<std::string, std::string>> env;  // added/overridden vars
    std::string input;                                     // fed to stdin
};

// Runs argv[0] with the given arguments and captures stdout/stderr.
// A missing binary maps to an environment error.
Result<RunResult> run_process(const std::vector<std::string>& argv,
                              const RunOptions& options = {});

}  // namespace srcmark
