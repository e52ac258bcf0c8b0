#pragma once

#include <stdexcept>
#include <string>

namespace rndunit {

/// Input failed a documented invariant (shape, Hermiticity, normalization...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inputs are individually valid but violate an operation's precondition,
/// e.g. a non-commuting realization handed to the dephasing generator.
class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The numerics went wrong: non-finite states, equivalence breaches.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rndunit
