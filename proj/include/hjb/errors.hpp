#pragma once

#include <stdexcept>
#include <string>

namespace hjb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or hyperparameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (time outside [0,T], wrong
/// dimension, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A time integration produced a non-finite state.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// An iterative method stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_measure)
      : Error(what), last_measure_(last_measure) {}
  double last_measure() const { return last_measure_; }

 private:
  double last_measure_;
};

/// Linear algebra failure (singular system, failed line search).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization failed even after the jitter ladder.
class FactorizationError : public NumericalError {
 public:
  FactorizationError(const std::string& what, long pivot)
      : NumericalError(what), pivot_(pivot) {}
  long pivot() const { return pivot_; }

 private:
  long pivot_;
};

/// Constraint assembly failed at a given sample.
class AssemblyError : public Error {
 public:
  AssemblyError(const std::string& what, long sample)
      : Error(what), sample_(sample) {}
  long sample() const { return sample_; }

 private:
  long sample_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hjb
