#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rothe {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch, out-of-range parameter, malformed argument.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A symmetric or general factorization hit a zero/negative pivot.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf appeared in an iterate.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// An oracle was called outside its domain of validity.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The per-step inclusion solver exhausted its budget.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// A time step of the Rothe scheme could not be completed.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, int step, std::vector<double> history)
      : Error(what), step_index(step), residual_history(std::move(history)) {}
  int step_index;
  std::vector<double> residual_history;
};

/// Config file syntax or schema error, tagged with line and key.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line_no, std::string key_name)
      : Error(what), line(line_no), key(std::move(key_name)) {}
  int line;
  std::string key;
};

}  // namespace rothe
