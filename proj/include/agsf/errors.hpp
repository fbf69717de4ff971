#pragma once

#include <stdexcept>
#include <string>

namespace agsf {

// Root of the library's error hierarchy.
struct AgsfError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cholesky failed even after the jitter ladder was exhausted.
struct SingularCovarianceError : AgsfError {
  using AgsfError::AgsfError;
};

// A matrix required to be PSD has an eigenvalue below -1e-9.
struct IndefiniteCovarianceError : AgsfError {
  using AgsfError::AgsfError;
};

// An augmentation covariance violates 0 <= Delta <= Sigma.
struct ConstraintViolationError : AgsfError {
  using AgsfError::AgsfError;
};

// Every component likelihood underflowed during a reweighting step.
struct WeightUnderflowError : AgsfError {
  using AgsfError::AgsfError;
};

// A weight vector has no positive mass to resample from.
struct DegenerateWeightsError : AgsfError {
  using AgsfError::AgsfError;
};

// A model was evaluated outside its domain (zero speed, origin bearing, ...).
struct ModelError : AgsfError {
  using AgsfError::AgsfError;
};

// Invalid or inconsistent configuration.
struct ConfigError : AgsfError {
  using AgsfError::AgsfError;
};

// File I/O failure; message carries the offending path.
struct IoError : AgsfError {
  using AgsfError::AgsfError;
};

// A filter run aborted mid-sequence; records the failing step.
struct FilterRunError : AgsfError {
  FilterRunError(int step_index, const std::string& what)
      : AgsfError("step " + std::to_string(step_index) + ": " + what),
        step(step_index) {}
  int step;
};

}  // namespace agsf
