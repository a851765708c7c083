#pragma once

#include <stdexcept>
#include <string>

namespace pfcc {

// Root of everything the library throws on purpose.  The CLI maps each
// subclass onto its own exit status, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario documents, unknown keys, ragged matrices.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A modelling assumption (reachability, positive propensities, solvable
// regulator equations, stabilizability ...) does not hold.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

// Regression matrices are rank deficient or too badly conditioned.
class PersistentExcitationError : public Error {
 public:
  using Error::Error;
};

// An iterative procedure ran out of budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace pfcc
