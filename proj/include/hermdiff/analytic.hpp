#pragma once

// Averaged characteristic polynomial pi_N(z, tau) = <det(z - H)> and its inverse
// theta_N(z, tau) = <1/det(z - H)> from their Gaussian integral representations:
//
//   pi_N    = sqrt(N/2 pi tau) int dq exp(-N (q - i z)^2 / 2 tau) pi_0(-i q)
//   theta_N = sqrt(N/2 pi tau) int_{Gamma+-} du exp(-N (u - z)^2 / 2 tau) / pi_0(u)
//
// Gamma+ (Gamma-) runs left to right above (below) every source eigenvalue. For a fixed
// contour theta is entire in z, so the two boundary values on the real axis are finite.

#include <complex>
#include <optional>
#include <vector>

#include "hermdiff/errors.hpp"
#include "hermdiff/log_complex.hpp"
#include "hermdiff/source.hpp"

namespace hermdiff {

enum class EvaluationMethod { quadrature, recurrence, cauchy_transform, monte_carlo };

const char* to_string(EvaluationMethod m);

struct PolynomialEvaluation {
  LogComplex value;
  EvaluationMethod method = EvaluationMethod::quadrature;
  double error_estimate = 0.0;  // relative

  Complex mantissa() const { return value.mantissa(); }
  double log_scale() const { return value.log_scale(); }
  Complex to_complex() const { return value.to_complex(); }
};

enum class Side { upper, lower };

// Source eigenvalues a_i raised to powers m_i (m_i may be 0), smoothed by a Gaussian of
// variance tau/N. N enters only through the variance, so the powers need not sum to N.
struct WeightedRoots {
  std::vector<double> points;
  std::vector<int> powers;

  static WeightedRoots from(const SourceSpectrum& source);
  int degree() const;
};

// E[prod (z - i sigma g - a_i)^{m_i}], g ~ N(0,1), sigma^2 = variance. Integrated along the
// vertical line Re xi = c that minimises the peak of the integrand (c at a saddle of the
// exponent when possible), in log-scaled form.
PolynomialEvaluation smoothed_polynomial(const WeightedRoots& roots, double variance, Complex z);

// sqrt(1/(2 pi variance)) int_{Gamma} exp(-(u - z)^2/(2 variance)) prod (u - a_i)^{-m_i} du along
// a horizontal line on the given side. With offset unset the line height minimises the peak
// of the integrand; otherwise it is Im u = +-offset.
PolynomialEvaluation smoothed_inverse(const WeightedRoots& roots, double variance, Complex z, Side side,
                                      std::optional<double> offset = std::nullopt);

PolynomialEvaluation acp(const SourceSpectrum& source, double tau, Complex z);

// Exact Gauss-Hermite rule on the line through the Gaussian centre. Exact in exact arithmetic,
// but suffers cancellation when |pi_N| is much smaller than E|pi_0(z - i sigma g)|.
PolynomialEvaluation acp_exact_rule(const SourceSpectrum& source, double tau, Complex z);

// Monic scaled Hermite polynomial p_N with p_{k+1} = z p_k - (k tau/N) p_{k-1}.
PolynomialEvaluation acp_hermite_recurrence(int n, double tau, Complex z);

struct AicpOptions {
  // Fixed contour height delta; requests with |Im z| < 2 delta are refused.
  std::optional<double> contour_offset;
};

// Gamma+ for Im z > 0, Gamma- for Im z < 0; Im z = 0 is a domain error.
PolynomialEvaluation aicp(const SourceSpectrum& source, double tau, Complex z, const AicpOptions& opts = {});

// theta_+ or theta_- at any z, including the real axis.
PolynomialEvaluation aicp_boundary(const SourceSpectrum& source, double tau, Complex z, Side side);

// Null source: Cauchy transform of p_{N-1} against exp(-N s^2 / 2 tau) divided by
// c^2_{N-1} = sqrt(2 pi tau/N) (tau/N)^{N-1} (N-1)!.
PolynomialEvaluation aicp_cauchy_null(int n, double tau, Complex z);

enum class Evaluator { acp, aicp };
enum class DiffusionSign { natural, reversed };

struct PdeResidual {
  Complex relative{};  // residual / value at (z, tau)
  LogComplex value;    // pi or theta at (z, tau)
  double abs_relative() const { return std::abs(relative); }
};

// d_tau F + (1/2N) d_zz F for acp, d_tau F - (1/2N) d_zz F for aicp, by central differences
// with one Richardson step each. DiffusionSign::reversed flips the diffusion term.
PdeResidual pde_residual(Evaluator evaluator, const SourceSpectrum& source, double tau, Complex z, double h_z,
                         double h_tau, DiffusionSign sign = DiffusionSign::natural);

// (1/N) d/dz log pi_N by a Richardson-extrapolated central difference.
Complex cole_hopf(const SourceSpectrum& source, double tau, Complex z, double h_z);

}  // namespace hermdiff
