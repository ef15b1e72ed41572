#pragma once

#include <stdexcept>
#include <string>

namespace mdfn {

/// Invalid design/solver configuration (non-physical fractions, bad bounds, ...).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Argument outside the admissible domain of a constitutive relation.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string &msg) : std::domain_error(msg) {}
};

/// Physically inconsistent state (over-lithiation, negative concentration, ...).
class StateError : public std::runtime_error {
public:
  explicit StateError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Time integration could not proceed (Newton failure at minimum step, ...).
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string &msg) : std::runtime_error(msg) {}
};

/// A study case or equalization target cannot be met within bounds.
class InfeasibleError : public std::runtime_error {
public:
  explicit InfeasibleError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace mdfn
