#include "hermdiff/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hermdiff/quadrature.hpp"
#include "hermdiff/source.hpp"

namespace hermdiff {

namespace {

constexpr double pi = std::numbers::pi;
const Complex I{0.0, 1.0};

Complex airy_rays(Complex x, Complex origin) {
  const ComplexFn f = [x](Complex t) { return std::exp(I * (t * t * t / 3.0 + x * t)); };
  // |exp(i t^3/3)| ~ exp(-r^3/3) far out on both rays; the origin shifts the decay onset.
  const double length = 6.0 + 2.0 * std::abs(origin) + std::sqrt(std::abs(x));
  const RayPair rays{origin, 5.0 * pi / 6.0, pi / 6.0, length, 64};
  return integrate_contour(f, rays).value / (2.0 * pi);
}

double pearcey_half_width(double x, double y) {
  return 8.0 + 2.0 * std::sqrt(std::max(std::abs(x), std::abs(y)));
}

LogComplex scaled(double log_abs, double phase) { return LogComplex::from_log({log_abs, phase}); }

void check_window_inputs(int n, const char* who) {
  if (n < 64) {
    std::ostringstream os;
    os << who << ": N >= 64 required, got " << n;
    throw PreconditionError(os.str());
  }
}

void check_cusp_inputs(int n, double a, const char* who) {
  if (n < 2 || n % 2 != 0) {
    std::ostringstream os;
    os << who << ": N must be even and positive, got " << n;
    throw PreconditionError(os.str());
  }
  if (!(a > 0.0)) throw DomainError(std::string(who) + ": a must be positive");
}

// Phase of (i a)^N for a > 0, reduced exactly via N mod 4.
double cusp_phase(int n) { return (n % 4) * (pi / 2.0); }

}  // namespace

double airy(double x) {
  if (!(std::abs(x) <= 30.0)) {
    std::ostringstream os;
    os << "airy: |x| = " << std::abs(x) << " exceeds 30; use the asymptotic expansion";
    throw DomainError(os.str());
  }
  // Through the upper saddle i sqrt(x) for x >= 0; for x < 0 below both real saddles, where
  // the integrand stays bounded by a modest constant instead of oscillating on the real axis.
  const Complex origin = x >= 0.0 ? Complex(0.0, std::sqrt(x)) : Complex(0.0, -1.1 * std::sqrt(-x / 3.0));
  return airy_rays(x, origin).real();
}

Complex airy(Complex x) {
  if (!(std::abs(x) <= 8.0)) throw DomainError("airy: complex argument with |x| > 8");
  return airy_rays(x, 0.0);
}

Complex pearcey(double x, double y) {
  if (!(std::abs(x) <= 20.0 && std::abs(y) <= 20.0)) throw DomainError("pearcey: |x|, |y| <= 20 required");
  // The odd part of exp(i t y) integrates to zero.
  const ComplexFn f = [x, y](Complex t) {
    const double r = t.real();
    const double r2 = r * r;
    return Complex(std::exp(-r2 * r2 / 4.0 + x * r2) * std::cos(y * r), 0.0);
  };
  const ShiftedLine line{0.0, 0.0, pearcey_half_width(x, y), 257};
  return integrate_contour(f, line).value;
}

Complex pearcey_contour(double x, double y, Side side) {
  const Complex w = std::polar(1.0, pi / 4.0);
  const ComplexFn f = [x, y, w](Complex s) {
    const Complex s2 = s * s;
    return std::exp(-s2 * s2 / 4.0 + I * x * s2 + w * y * s);
  };
  const double length = pearcey_half_width(x, y);
  const RayPair rays = side == Side::upper ? RayPair{0.0, pi / 2.0, 0.0, length, 64}
                                           : RayPair{0.0, pi, -pi / 2.0, length, 64};
  return w * integrate_contour(f, rays).value;
}

Rational::Rational(long num, long den) {
  if (den == 0) throw DomainError("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long g = std::gcd(num, den);
  num_ = g ? num / g : num;
  den_ = g ? den / g : den;
}

Rational operator+(Rational a, Rational b) { return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_}; }
Rational operator-(Rational a, Rational b) { return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_}; }
Rational operator*(Rational a, Rational b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
Rational operator/(Rational a, Rational b) { return {a.num_ * b.den_, a.den_ * b.num_}; }

Rational spacing_exponent(int k) {
  if (k < 2) throw DomainError("spacing_exponent: k >= 2 required");
  return {-k, 1 + k};
}

ScalingWindow ScalingWindow::airy_edge(int n, double tau) {
  if (!(tau > 0.0)) throw DomainError("airy_edge: tau must be positive");
  const Rational alpha = spacing_exponent(2);
  return {WindowKind::airy_edge, n, 2.0 * std::sqrt(tau), tau, alpha, alpha / Rational(2), std::nullopt};
}

ScalingWindow ScalingWindow::pearcey_cusp(int n, double a) {
  if (!(a > 0.0)) throw DomainError("pearcey_cusp: a must be positive");
  const Rational alpha = spacing_exponent(3);
  return {WindowKind::pearcey_cusp, n, 0.0, a * a, alpha, alpha / Rational(3), Rational(-1, 2)};
}

bool ScalingWindow::identities_hold() const {
  const Rational k(order());
  const Rational one(1);
  return alpha * (one + k) == Rational(0) - k && beta == alpha / k && beta == Rational(0) - (one + alpha);
}

std::vector<EdgeSample> acp_edge_profile(int n, double tau, const std::vector<double>& etas) {
  check_window_inputs(n, "acp_edge_profile");
  if (!(tau > 0.0)) throw DomainError("acp_edge_profile: tau must be positive");
  const SourceSpectrum source = SourceSpectrum::null(n);
  const double st = std::sqrt(tau);
  const double nd = n;
  std::vector<EdgeSample> out;
  for (double eta : etas) {
    const double z = 2.0 * st + eta * std::pow(nd, -2.0 / 3.0);
    const double log_pref = 0.5 * std::log(2.0 * pi) + std::log(nd) / 6.0 + 0.5 * nd * std::log(tau) + 0.5 * nd +
                            eta * std::cbrt(nd) / st;
    const LogComplex value = acp(source, tau, z).value;
    out.push_back({eta, ratio(value, scaled(log_pref, 0.0)), airy(eta / st)});
  }
  return out;
}

std::vector<EdgeSample> aicp_edge_profile(int n, double tau, const std::vector<double>& etas, Side side) {
  check_window_inputs(n, "aicp_edge_profile");
  if (!(tau > 0.0)) throw DomainError("aicp_edge_profile: tau must be positive");
  const SourceSpectrum source = SourceSpectrum::null(n);
  const double st = std::sqrt(tau);
  const double nd = n;
  const double sgn = side == Side::upper ? 1.0 : -1.0;
  std::vector<EdgeSample> out;
  for (double eta : etas) {
    const double z = 2.0 * st + eta * std::pow(nd, -2.0 / 3.0);
    const double log_pref = 0.5 * std::log(2.0 * pi) + std::log(nd) / 6.0 - 0.5 * nd * std::log(tau) - 0.5 * nd -
                            eta * std::cbrt(nd) / st;
    const LogComplex value = aicp_boundary(source, tau, z, side).value;
    const Complex limit = std::polar(1.0, -sgn * pi / 6.0) * airy(std::polar(eta / st, -sgn * 2.0 * pi / 3.0));
    out.push_back({eta, ratio(value, scaled(log_pref, 0.0)), limit});
  }
  return out;
}

std::vector<CuspSample> acp_cusp_profile(int n, double a, const std::vector<double>& kappas,
                                         const std::vector<double>& etas) {
  check_cusp_inputs(n, a, "acp_cusp_profile");
  const SourceSpectrum source = SourceSpectrum::symmetric_pair(a, n);
  const double nd = n;
  const LogComplex pref = scaled(0.25 * std::log(nd) - 0.5 * std::log(2.0 * pi) + nd * std::log(a), cusp_phase(n));
  std::vector<CuspSample> out;
  for (double kappa : kappas) {
    const double tau = a * a + kappa / std::sqrt(nd);
    for (double eta : etas) {
      const double z = eta * std::pow(nd, -0.75);
      const LogComplex value = acp(source, tau, z).value;
      out.push_back({kappa, eta, ratio(value, pref), pearcey(kappa / (2.0 * a * a), eta / a)});
    }
  }
  return out;
}

std::vector<CuspSample> aicp_cusp_profile(int n, double a, const std::vector<double>& kappas,
                                          const std::vector<double>& etas, Side side) {
  check_cusp_inputs(n, a, "aicp_cusp_profile");
  const SourceSpectrum source = SourceSpectrum::symmetric_pair(a, n);
  const double nd = n;
  const LogComplex pref = scaled(0.25 * std::log(nd) - 0.5 * std::log(2.0 * pi) - nd * std::log(a), -cusp_phase(n));
  std::vector<CuspSample> out;
  for (double kappa : kappas) {
    const double tau = a * a + kappa / std::sqrt(nd);
    for (double eta : etas) {
      const double z = eta * std::pow(nd, -0.75);
      const LogComplex value = aicp_boundary(source, tau, z, side).value;
      out.push_back(
          {kappa, eta, ratio(value, pref), pearcey_contour(kappa / (2.0 * a * a), eta / a, side)});
    }
  }
  return out;
}

}  // namespace hermdiff
