#pragma once

// Airy and Pearcey functions and the microscopic scans of pi_N and theta_N near a soft
// edge z_c = 2 sqrt(tau) (window N^{-2/3}) and near the cusp z = 0, tau = a^2 of the
// symmetric two-source flow (windows z ~ N^{-3/4}, tau - a^2 ~ N^{-1/2}).

#include <complex>
#include <optional>
#include <vector>

#include "hermdiff/analytic.hpp"
#include "hermdiff/errors.hpp"

namespace hermdiff {

// Ai(x) = (1/2 pi) int exp(i(t^3/3 + x t)) dt along rays at phases 5 pi/6 (in) and pi/6 (out).
// |x| <= 30.
double airy(double x);
// Same contour for complex argument, |x| <= 8.
Complex airy(Complex x);

// P(x, y) = int exp(-t^4/4 + x t^2 + i t y) dt over the real line, |x|, |y| <= 20.
Complex pearcey(double x, double y);

// e^{i pi/4} int_{C} exp(-s^4/4 + i x s^2 + e^{i pi/4} y s) ds with C running from i inf to 0
// to +inf (upper) or from -inf to 0 to -i inf (lower). The two sides are complex conjugates.
Complex pearcey_contour(double x, double y, Side side);

class Rational {
 public:
  Rational(long num = 0, long den = 1);
  long num() const { return num_; }
  long den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }

 private:
  long num_;
  long den_;
};

// -k/(1 + k), k >= 2.
Rational spacing_exponent(int k);

enum class WindowKind { airy_edge, pearcey_cusp };

struct ScalingWindow {
  WindowKind kind;
  int n;
  double z_c;
  double tau_c;
  Rational alpha;                 // z - z_c = N^alpha eta
  Rational beta;                  // conjugate integration variable q = t N^beta
  std::optional<Rational> gamma;  // tau - tau_c = kappa N^gamma (cusp only)

  static ScalingWindow airy_edge(int n, double tau);
  static ScalingWindow pearcey_cusp(int n, double a);

  int order() const { return kind == WindowKind::airy_edge ? 2 : 3; }
  // alpha (1 + k) = -k, beta = alpha / k = -(1 + alpha), exactly.
  bool identities_hold() const;
};

struct EdgeSample {
  double eta = 0.0;
  Complex rescaled{};
  Complex limit{};
  double abs_error() const { return std::abs(rescaled - limit); }
  double rel_error() const { return std::abs(rescaled - limit) / std::abs(limit); }
};

struct CuspSample {
  double kappa = 0.0;
  double eta = 0.0;
  Complex rescaled{};
  Complex limit{};
  double abs_error() const { return std::abs(rescaled - limit); }
  double rel_error() const { return std::abs(rescaled - limit) / std::abs(limit); }
};

// pi_N(2 sqrt(tau) + eta N^{-2/3}) / [sqrt(2 pi) N^{1/6} tau^{N/2} exp(N/2 + eta N^{1/3}/sqrt(tau))]
// against Ai(eta/sqrt(tau)). Null source, N >= 64.
std::vector<EdgeSample> acp_edge_profile(int n, double tau, const std::vector<double>& etas);

// theta_+-(2 sqrt(tau) + eta N^{-2/3}) / [sqrt(2 pi) N^{1/6} tau^{-N/2} exp(-N/2 - eta N^{1/3}/sqrt(tau))]
// against e^{-+i pi/6} Ai(e^{-+2 i pi/3} eta/sqrt(tau)), upper/lower sign. Null source, N >= 64.
std::vector<EdgeSample> aicp_edge_profile(int n, double tau, const std::vector<double>& etas, Side side);

// pi_N(eta N^{-3/4}, a^2 + kappa N^{-1/2}) / [(N^{1/4}/sqrt(2 pi)) (i a)^N] against
// P(kappa/2a^2, eta/a). Source {(-a, N/2), (a, N/2)}, N even. Row-major in (kappa, eta).
std::vector<CuspSample> acp_cusp_profile(int n, double a, const std::vector<double>& kappas,
                                         const std::vector<double>& etas);

// theta_+-(eta N^{-3/4}, a^2 + kappa N^{-1/2}) / [(N^{1/4}/sqrt(2 pi)) (i a)^{-N}] against
// pearcey_contour(kappa/2a^2, eta/a, side).
std::vector<CuspSample> aicp_cusp_profile(int n, double a, const std::vector<double>& kappas,
                                          const std::vector<double>& etas, Side side);

}  // namespace hermdiff
