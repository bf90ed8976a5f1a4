#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wikimrc::cli {

// Runs one command line (without the program name) and returns the process
// exit code: 0 success, 1 usage error, 2 data error, 3 numeric failure.
// Reports and usage text go to `out` and `err`; logs go to standard error.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace wikimrc::cli
