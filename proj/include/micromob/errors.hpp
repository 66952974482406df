#pragma once

#include <stdexcept>
#include <string>

namespace micromob {

/// Bad user-supplied configuration: schema maps, config files, CLI flags.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Input that violates an operation's precondition.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure reading or writing a data file.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace micromob
