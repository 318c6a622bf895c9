#pragma once

#include <stdexcept>
#include <string>

namespace axon {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A pivot collapsed during QR: the sample matrix has (numerically) dependent
/// columns, e.g. a constant input coordinate.
struct RankDeficient : Error {
  using Error::Error;
};

/// The candidate basis function lies in the span of the current basis.
struct DegenerateDirection : Error {
  using Error::Error;
};

/// The ReLU-specific objective form was asked for with a non-ReLU activation.
struct NotReLU : Error {
  using Error::Error;
};

/// Every solver restart came back with a (near-)zero objective: no improving
/// direction exists and basis growth must stop.
struct NoAscent : Error {
  using Error::Error;
};

/// An in-memory model violates its own invariants (non-positive beta,
/// mismatched vector lengths).
struct ModelCorrupt : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

/// A model file parsed but failed validation; the message names the field.
struct SchemaError : Error {
  using Error::Error;
};

/// Loss or gradient became non-finite during gradient-descent training.
struct NumericalBlowup : Error {
  explicit NumericalBlowup(const std::string& what, int restart = -1)
      : Error(what), restart_index(restart) {}
  int restart_index;
};

/// Every random restart of the baseline trainer diverged.
struct AllDiverged : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

/// The reference function is identically zero on the evaluation grid, so a
/// relative error is undefined.
struct ZeroNorm : Error {
  using Error::Error;
};

}  // namespace axon
