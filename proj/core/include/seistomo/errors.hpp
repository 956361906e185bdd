#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace seistomo {

/// Bad user input: configs, shapes, out-of-domain positions, invalid widths.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver hit its iteration cap before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// A Krylov recurrence produced a singular block system.
class BreakdownError : public std::runtime_error {
public:
  BreakdownError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration(iteration) {}
  int iteration;
};

/// Direct factorization failed (singular pivot).
class FactorizationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operation called in the wrong order (missing cached state, stale fields).
class StateError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace seistomo
