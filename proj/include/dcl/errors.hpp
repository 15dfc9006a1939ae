#pragma once

#include <stdexcept>
#include <string>

namespace dcl {

/// Inputs outside an operation's domain (non-composable pair, constraint
/// violation, retraction branch cut, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Newton failed to reach tolerance.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Newton Jacobian is numerically singular; the system is not regular at
/// this point.
struct RegularityError : std::runtime_error {
  explicit RegularityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dcl
