#pragma once

// Large-N spectral dynamics: G(z, tau) = G0(xi) with z = xi + tau G0(xi).

#include <complex>
#include <utility>
#include <vector>

#include "hermdiff/errors.hpp"
#include "hermdiff/source.hpp"

namespace hermdiff {

// G0(xi) = sum_i (m_i/N)/(xi - a_i).
Complex green0(const SourceSpectrum& source, Complex xi);
// G0'(xi).
Complex green0_derivative(const SourceSpectrum& source, Complex xi);

struct GreenEvaluation {
  Complex value{};
  int root_index = 0;     // position of the label among all roots, sorted by (Re, Im)
  double residual = 0.0;  // |z - xi - tau G0(xi)|
  Complex label{};        // characteristic label xi
};

// Physical root of z = xi + tau G0(xi), tracked from z + i R sgn(Im z) down to z.
GreenEvaluation solve_characteristics(const SourceSpectrum& source, double tau, Complex z);

struct CausticSet {
  std::vector<double> positions;  // z_c, ascending
  std::vector<double> labels;     // xi_c
  bool merged = false;
};

CausticSet caustics(const SourceSpectrum& source, double tau);

// Closed intervals [left, right] carrying the limiting density.
std::vector<std::pair<double, double>> support_intervals(const SourceSpectrum& source, double tau);

// (1/pi)|Im G(lambda - i eps)| extrapolated to eps -> 0; zero off the support.
double density(const SourceSpectrum& source, double tau, double lambda);

struct MergePoint {
  double z_c = 0.0;
  double tau_c = 0.0;
};

// Time at which the inner caustics of {(-a, N/2), (a, N/2)} coalesce, by bisection.
MergePoint merge_point(const SourceSpectrum& source);

}  // namespace hermdiff
