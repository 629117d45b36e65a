#pragma once

// Contour descriptions and integration engines shared by the analytic evaluators.
//
// All trapezoid-type rules refine by node doubling; the reported error is the
// difference between the last two refinements.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <variant>
#include <vector>

#include "hermdiff/errors.hpp"
#include "hermdiff/log_complex.hpp"

namespace hermdiff {

using ComplexFn = std::function<Complex(Complex)>;

enum class Orientation { counterclockwise, clockwise };

// Horizontal segment Im w = offset, Re w in [center - half_width, center + half_width].
struct ShiftedLine {
  double offset = 0.0;
  double center = 0.0;
  double half_width = 1.0;
  int nodes = 64;
};

// Gauss-Hermite rule: integral of f(center + scale * x) exp(-x^2/2) scale dx over real x.
// The Gaussian weight is implied, f excludes it.
struct HermiteRule {
  Complex center{};
  double scale = 1.0;
  int nodes = 16;
};

struct ClosedLoop {
  Complex center{};
  double radius = 1.0;
  int nodes = 64;
  Orientation orientation = Orientation::counterclockwise;
};

// Incoming ray from origin + length * e^{i angle_in} to origin, then outgoing ray
// from origin to origin + length * e^{i angle_out}.
struct RayPair {
  Complex origin{};
  double angle_in = 0.0;
  double angle_out = 0.0;
  double length = 1.0;
  int nodes = 64;
};

using ContourSpec = std::variant<ShiftedLine, HermiteRule, ClosedLoop, RayPair>;

// Throws ConfigurationError when a contour violates its invariants.
void validate(const ContourSpec& contour);

struct QuadratureResult {
  Complex value{};
  double error_estimate = 0.0;
  int nodes_used = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-12;
  int max_nodes = 1 << 20;
};

// Nodes and weights of an n-point Gauss rule, computed by Golub-Welsch.
template <typename Real>
struct GaussRule {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> weights;
};

namespace detail {

template <typename Real>
GaussRule<Real> golub_welsch(const Eigen::Matrix<Real, Eigen::Dynamic, 1>& offdiag, Real mu0) {
  const Eigen::Index n = offdiag.size() + 1;
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> jacobi =
      Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = offdiag(k);
    jacobi(k + 1, k) = offdiag(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>> eig(jacobi);
  GaussRule<Real> rule;
  rule.nodes = eig.eigenvalues();
  rule.weights = mu0 * eig.eigenvectors().row(0).transpose().array().square();
  return rule;
}

}  // namespace detail

// Probabilists' Gauss-Hermite rule, weight exp(-x^2/2); weights sum to sqrt(2 pi).
template <typename Real = double>
GaussRule<Real> gauss_hermite_rule(int n) {
  if (n < 1) throw DomainError("gauss_hermite_rule: n must be positive");
  Eigen::Matrix<Real, Eigen::Dynamic, 1> off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(Real(k));
  return detail::golub_welsch<Real>(off, std::sqrt(2 * std::numbers::pi_v<Real>));
}

// Gauss-Legendre rule on [-1, 1].
template <typename Real = double>
GaussRule<Real> gauss_legendre_rule(int n) {
  if (n < 1) throw DomainError("gauss_legendre_rule: n must be positive");
  Eigen::Matrix<Real, Eigen::Dynamic, 1> off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = Real(k) / std::sqrt(Real(4 * k * k - 1));
  return detail::golub_welsch<Real>(off, Real(2));
}

// Node count that makes the Gauss-Hermite rule exact for polynomials of degree deg.
inline int exact_rule_nodes(int deg) { return (deg + 2) / 2 + 4; }

// Half-width at which exp(-r^2 / (2 variance)) drops to exp(-45).
inline double truncation_half_width(double variance) { return std::sqrt(90.0 * variance); }

// Default offset of the horizontal contours above/below the real axis.
inline double pole_clearance(double tau, int n) { return 0.5 * std::sqrt(tau / n); }

// Integral of f(q) exp(-(q - center)^2 / (2 variance)) dq along the line through center
// parallel to the real axis. With degree_hint >= 0 the exact Gauss-Hermite rule for that
// degree is used and no error estimate is formed; a negative hint selects adaptive doubling.
QuadratureResult integrate_gaussian_line(const ComplexFn& f, Complex center, double variance,
                                         int degree_hint, const QuadratureOptions& opts = {});

QuadratureResult integrate_contour(const ComplexFn& f, const ContourSpec& contour,
                                   const QuadratureOptions& opts = {});

// A straight integration path parametrized by a real coordinate r, with the integrand given
// through its logarithm so that magnitudes far outside the double range are representable.
struct LogLine {
  // log f at coordinate r.
  std::function<Complex(double)> log_integrand;
  // Rigorous upper bound of Re log f over [r1, r2]; either end may be infinite. Returning
  // +inf means "no usable bound".
  std::function<double(double, double)> upper_bound;
  // Coordinates where the integrand may peak (saddles, Gaussian centre).
  std::vector<double> anchors;
  // Spacing small enough to resolve every peak of |f|.
  double resolution = 1.0;
};

// Significant window [lo, hi] of a LogLine and the peak of Re log f.
struct LineProfile {
  double max_log = -std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double hi = 0.0;
  int evaluations = 0;
};

// Explores the line outward from its anchors, skipping stretches the bound rules out, and
// returns the window where Re log f >= max_log - cut.
LineProfile profile_log_line(const LogLine& line, double cut = 45.0);

struct LogQuadratureResult {
  LogComplex value;
  double error_estimate = 0.0;  // relative
  int nodes_used = 0;
};

// Trapezoid integral of f(r) dr over the profiled window with node doubling, accumulated
// as exp(log f - max_log) and returned in log-scaled form.
LogQuadratureResult integrate_log_line(const LogLine& line, const LineProfile& profile,
                                       const QuadratureOptions& opts = {});

// Pairwise (cascade) summation.
Complex pairwise_sum(const Complex* values, std::size_t count);

}  // namespace hermdiff
