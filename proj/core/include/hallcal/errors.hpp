#pragma once

#include <stdexcept>
#include <string>

namespace hallcal {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, prior specification or unit tag.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Function evaluated outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Plume parameters that produce an undefined divergence angle.
class ParameterRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The discharge solver produced a non-finite state.
class SolverDivergence : public Error {
 public:
  SolverDivergence(long step, std::string field, const std::string& detail)
      : Error("solver diverged at step " + std::to_string(step) + " in field '" + field +
              "': " + detail),
        step_(step),
        field_(std::move(field)) {}

  long step() const noexcept { return step_; }
  const std::string& field() const noexcept { return field_; }

 private:
  long step_;
  std::string field_;
};

/// The discharge solver exceeded its wall-clock budget.
class SolverTimeout : public Error {
 public:
  using Error::Error;
};

/// Malformed dataset or chain file. Carries the offending 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, int line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace hallcal
