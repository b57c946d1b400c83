#pragma once

#include <stdexcept>

namespace aero {

// Base class for every error the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor or layer shape mismatch.
struct DimensionError : Error {
  using Error::Error;
};

// A non-finite value where a finite one is required (NaN/Inf in a kernel
// result, diverging training loss, non-finite gradients).
struct NumericError : Error {
  using Error::Error;
};

// Invalid configuration or data failing validation: bad split ratios,
// degenerate (constant) features, unknown tokens, too few samples.
struct ValidationError : Error {
  using Error::Error;
};

// Filesystem failures.
struct IoError : Error {
  using Error::Error;
};

// API misuse, e.g. backward() called before forward().
struct ProtocolError : Error {
  using Error::Error;
};

// Model file problems; subclasses distinguish the failure mode.
struct SerializationError : Error {
  using Error::Error;
};
struct VersionError : SerializationError {
  using SerializationError::SerializationError;
};
struct TruncationError : SerializationError {
  using SerializationError::SerializationError;
};
struct ChecksumError : SerializationError {
  using SerializationError::SerializationError;
};

}  // namespace aero
