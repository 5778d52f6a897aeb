#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace tdreg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or mismatched dimensions between components.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A buffer or batch does not hold enough samples for the request.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite intermediate values, failed convergence, singular systems.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The closed-loop LQR system is unstable, so values are unbounded.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Inconsistent recorded data (e.g. zero behavior density).
class DataError : public Error {
 public:
  using Error::Error;
};

/// An API was called with arguments that do not match the object kind.
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace tdreg
