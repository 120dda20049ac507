#pragma once

#include <stdexcept>
#include <string>

namespace pbit {

/// Bad input, broken precondition, or violated hardware constraint.
/// Mapped to exit code 1 by the CLI.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Instance exceeds a hard enumeration cap. Mapped to exit code 2 by the CLI.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pbit
