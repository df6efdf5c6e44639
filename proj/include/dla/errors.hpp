#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dla {

// Error kinds map onto the CLI exit codes: runtime failure = 1, bad
// configuration / bad input = 2, exceeded resource budget = 3.
enum class ErrorKind : int { Runtime = 1, Config = 2, Resource = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Invalid construction parameters or malformed user input.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};

// Arguments outside an operation's stated domain (negative radius, empty set,
// quantity undefined for the given data).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& w) : Error(ErrorKind::Config, w) {}
};

// A computation would exceed an explicit memory / count budget.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& w)
      : Error(ErrorKind::Resource, w) {}
};

// A random-walk attempt exceeded its per-walk step budget.
class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& w) : Error(ErrorKind::Runtime, w) {}
};

// A rejection sampler exhausted its retry budget.
class SamplingError : public Error {
 public:
  explicit SamplingError(const std::string& w)
      : Error(ErrorKind::Runtime, w) {}
};

// Iterative linear solve failed to reach the requested tolerance.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& w) : Error(ErrorKind::Runtime, w) {}
};

// Random environment construction failed (e.g. no spanning cluster found
// within the attempt budget).
class ConstructionError : public Error {
 public:
  explicit ConstructionError(const std::string& w)
      : Error(ErrorKind::Runtime, w) {}
};

// Enumeration hit its set-count budget; carries how many sets were emitted
// before stopping so callers can report partial progress.
class EnumerationBudgetError : public ResourceError {
 public:
  EnumerationBudgetError(const std::string& w, uint64_t emitted)
      : ResourceError(w), sets_emitted(emitted) {}
  uint64_t sets_emitted;
};

}  // namespace dla
