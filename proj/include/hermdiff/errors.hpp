#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hermdiff {

using Complex = std::complex<double>;

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (pole, real axis, tau <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Source spectrum shape not supported by an operation.
class UnsupportedSourceError : public Error {
 public:
  using Error::Error;
};

// Invalid contour or loop geometry.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Integrand did not decay at the truncation endpoints.
class TruncationError : public Error {
 public:
  using Error::Error;
};

// Refinement did not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Complex best_estimate, double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  Complex best_estimate() const { return best_estimate_; }
  double error_estimate() const { return error_estimate_; }

 private:
  Complex best_estimate_;
  double error_estimate_;
};

// Two characteristic roots came too close to decide which one continues the physical branch.
class BranchAmbiguityError : public Error {
 public:
  BranchAmbiguityError(const std::string& what, std::vector<Complex> candidates)
      : Error(what), candidates_(std::move(candidates)) {}

  const std::vector<Complex>& candidates() const { return candidates_; }

 private:
  std::vector<Complex> candidates_;
};

}  // namespace hermdiff
