#pragma once

#include <stdexcept>
#include <string>

namespace patrol {

// Exit codes used by the CLI: 0 success, then one distinct code per failure class.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitIoError = 3,
  kExitNumericError = 4,
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace patrol
