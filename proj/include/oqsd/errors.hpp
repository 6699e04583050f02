#pragma once

#include <stdexcept>
#include <string>

namespace oqsd {

/// Operation not defined for the given model (e.g. no printed closed form).
class UnsupportedError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Request exceeds a hard resource bound (bath too large, etc.).
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative or grid computation produced non-finite values.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A search finished without a hit; carries the best value achieved.
class NotFoundError : public std::runtime_error {
public:
  NotFoundError(const std::string& what, double best_value)
      : std::runtime_error(what), best(best_value) {}
  double best;
};

/// Linear solve too close to degeneracy to be trusted.
class IllConditionedError : public std::runtime_error {
public:
  IllConditionedError(const std::string& what, double cond)
      : std::runtime_error(what), condition_number(cond) {}
  double condition_number;
};

} // namespace oqsd
