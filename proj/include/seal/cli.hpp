#pragma once

#include <string>
#include <vector>

namespace seal::cli {

// Entry point shared by the seal binary and the test suites. Returns the
// process exit code: 0 success, 1 runtime error, 2 validation error.
// Machine-readable JSON error reports go to stderr; stdout carries results.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace seal::cli
