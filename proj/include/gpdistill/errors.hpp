#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace gpdistill {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or violated preconditions. The CLI maps these to exit code 1.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input files, truncated artifacts, version mismatches.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Singular systems, indefinite matrices, Newton failures. The CLI maps these
// to exit code 2. `step` and `cell` locate the failure inside a distillation
// chain or a hyperparameter grid when known.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}

  std::optional<int> step;
  std::optional<int> cell;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IndefiniteMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, int iterations, double grad_norm)
      : NumericalError(what), iterations(iterations), grad_norm(grad_norm) {}

  int iterations;
  double grad_norm;
};

// Rethrows the in-flight NumericalError (any subclass) with a step tag.
[[noreturn]] void rethrow_with_step(int step);

}  // namespace gpdistill
