#pragma once

#include <stdexcept>
#include <string>

namespace adiaband {

// Base of every error raised by the library. The category decides the CLI
// exit code: validation -> 1, numerical -> 2, io -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NonHermitianError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Spectral gap fell below the admissible minimum (singular reduced resolvent).
class GapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Consecutive band frames overlap too weakly to match unambiguously.
class BandTrackingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ToleranceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class AliasingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BoundaryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace adiaband
