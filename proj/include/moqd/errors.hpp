#pragma once

#include <stdexcept>
#include <string>

namespace moqd {

// Raised when a caller breaks a documented precondition (length mismatch,
// point below the reference, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Raised for invalid run or domain configuration.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace moqd
