#pragma once

#include <stdexcept>
#include <string>

namespace treebandit {

// Error families map 1:1 to CLI exit codes (see tools/).
//   ConfigError   -> 2   bad configuration before any work starts
//   InputError    -> 3   unreadable or malformed input files, unknown ids
//   InternalError -> 4   broken internal invariants (corrupt tree, ledger overrun)
// Argument-contract violations (dimension mismatch, empty candidate list, ...)
// throw std::invalid_argument.

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

class InternalError : public std::runtime_error {
public:
  explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace treebandit
