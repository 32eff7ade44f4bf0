#pragma once

#include <stdexcept>
#include <string>

namespace bellsim {

// Error taxonomy mirrors the CLI exit codes: usage (2), domain (3),
// convergence (4), io (5). Anything else escaping main is a plain 1.

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Parameters outside the mathematical domain of an operation (e.g. a
// double-well quantity requested at gamma >= -1, |z| > 1, m > N).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Eigensolver failed to converge; carries the solver's diagnostic.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bellsim
