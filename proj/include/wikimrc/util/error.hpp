#pragma once

#include <stdexcept>
#include <string>

namespace wikimrc {

// Process exit codes shared by every command-line entry point.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kNumeric = 3,
};

// Base class for all library errors. The exit code tells the CLI how to
// report the failure.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string &what) : Error(ExitCode::kUsage, what) {}
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string &what) : Error(ExitCode::kData, what) {}
};

// Non-finite values during training or scoring.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string &what)
      : Error(ExitCode::kNumeric, what) {}
};

}  // namespace wikimrc
