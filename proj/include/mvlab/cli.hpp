#pragma once

// Entry points of the command-line tool. The argument-vector form is the real
// implementation; it returns the process exit status and hands back the JSON
// document it produced, so tests can drive full invocations in-process
// without spawning the binary.
//
// Exit statuses: 0 success, 1 precondition/degeneracy failure with an
// {"error": ...} envelope, 2 unparsable request (bad flags, bad JSON, bad
// shapes, unknown keys).

#include <string>
#include <vector>

namespace mvlab {

int run_cli_args(const std::vector<std::string>& args, std::string& output);

int run_cli(int argc, const char** argv);

}  // namespace mvlab
