#pragma once

#include <stdexcept>
#include <string>

namespace drlcp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point (or sample) violates the hyperrectangular support.
struct OutOfSupport : Error {
  using Error::Error;
};

// Vector/matrix sizes do not match the declared layout.
struct ShapeMismatch : Error {
  using Error::Error;
};
using DimensionMismatch = ShapeMismatch;

struct ParseError : Error {
  using Error::Error;
};

// Cost-piece combination count exceeds the configured cap.
struct PieceExplosion : Error {
  using Error::Error;
};

struct ModelTooLarge : Error {
  using Error::Error;
};

struct NumericalFailure : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace drlcp
