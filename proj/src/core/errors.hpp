#pragma once

#include <stdexcept>
#include <string>

namespace ssx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad environment/run configuration (invalid layout, out-of-range parameter, unknown key).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// State enumeration exceeded its cap; caller should switch to a local approximation.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// A state or index was not part of the state space it was used against.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Requested a path between states with no connecting path.
class NoPathError : public Error {
 public:
  using Error::Error;
};

/// Transition likelihoods outside [0,1] or rows that do not normalize.
class InvalidModelError : public Error {
 public:
  using Error::Error;
};

/// Mismatched table/assignment sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver ran out of iterations; carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double residual)
      : Error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class RenderError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssx
