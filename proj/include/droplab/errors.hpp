#pragma once

#include <stdexcept>
#include <string>

namespace droplab {

/// Invalid numeric parameter (s outside (0,1), lambda <= 0, ...).
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the domain of a function (kernel at the origin, phi at x <= 0).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A documented precondition of an operation does not hold for its inputs.
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Malformed configuration or input file.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Missing or unreadable input file.
class PathError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// Iterative procedure failed to converge or bracket.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace droplab
