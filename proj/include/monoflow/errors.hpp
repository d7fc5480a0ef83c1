#pragma once

#include <stdexcept>
#include <string>

namespace monoflow {

/// Base class for all monoflow errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network document (bad token, missing header, ...).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid network (self-loop, duplicate edge, disconnected, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Topology the solver cannot handle, e.g. trees, whose nontrivial
/// solution set is empty.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Constructive seeding failed (rank deficiency after resampling).
class SeedingError : public Error {
 public:
  using Error::Error;
};

/// Hard solver failure (e.g. the initial fiber transport never succeeded).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Pivot collapse in a dense linear solve.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Mismatched vector/matrix dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace monoflow
