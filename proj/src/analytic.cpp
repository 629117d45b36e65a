#include "hermdiff/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hermdiff/polynomial.hpp"
#include "hermdiff/quadrature.hpp"

namespace hermdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCut = 45.0;

struct Active {
  std::vector<double> a;
  std::vector<double> m;
  double total = 0.0;
  double max_power = 0.0;
};

Active active_of(const WeightedRoots& roots) {
  if (roots.points.size() != roots.powers.size()) throw DomainError("points and powers differ in length");
  Active out;
  for (std::size_t i = 0; i < roots.points.size(); ++i) {
    if (roots.powers[i] < 0) throw DomainError("multiplicities must be nonnegative");
    if (roots.powers[i] == 0) continue;
    out.a.push_back(roots.points[i]);
    out.m.push_back(roots.powers[i]);
    out.total += roots.powers[i];
    out.max_power = std::max(out.max_power, static_cast<double>(roots.powers[i]));
  }
  return out;
}

double distance_to(double x, double lo, double hi) {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

double log_gauss_norm(double variance) { return -0.5 * std::log(2.0 * std::numbers::pi * variance); }

std::vector<Complex> saddles(const Active& act, double variance, Complex z) {
  if (act.a.empty()) return {z};
  return poly_roots(characteristic_polynomial(act.a, act.m, variance, z));
}

// Minimises objective over x: the best of the candidates, then golden section between its
// neighbours (or the outer limits).
template <typename Objective>
double minimise(std::vector<double> candidates, double lo, double hi, Objective&& objective) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::vector<double> values;
  for (double x : candidates) values.push_back(objective(x));
  const std::size_t k = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  double best_x = candidates[k];
  double best_v = values[k];
  double left = k > 0 ? candidates[k - 1] : std::min(lo, best_x);
  double right = k + 1 < candidates.size() ? candidates[k + 1] : std::max(hi, best_x);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = right - g * (right - left);
  double x2 = left + g * (right - left);
  double f1 = objective(x1);
  double f2 = objective(x2);
  const double tol = 1e-10 * (std::abs(best_x) + (right - left)) + 1e-300;
  for (int it = 0; it < 60 && right - left > tol; ++it) {
    if (f1 < f2) {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - g * (right - left);
      f1 = objective(x1);
    } else {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + g * (right - left);
      f2 = objective(x2);
    }
  }
  if (f1 < best_v) {
    best_v = f1;
    best_x = x1;
  }
  if (f2 < best_v) best_x = x2;
  return best_x;
}

// Integrand of the ACP along xi = c + i (Im z + r).
struct PolyLine {
  const Active& act;
  double s;
  Complex z;
  double c;
  double y_minus;
  double y_plus;

  PolyLine(const Active& a, double variance, Complex zz, double cc) : act(a), s(variance), z(zz), c(cc) {
    const double disc = std::sqrt(z.imag() * z.imag() + 4.0 * act.total * s);
    y_plus = 0.5 * (z.imag() + disc);
    y_minus = 0.5 * (z.imag() - disc);
  }

  // Constant part (c - Re z)^2 / 2s of the exponent, kept out of log_f so that the
  // r-dependence is resolved even when it is tiny in comparison.
  double constant() const {
    const double dx = c - z.real();
    return dx * dx / (2.0 * s);
  }

  Complex log_f(double r) const {
    const double dx = c - z.real();
    Complex l(-r * r / (2.0 * s), dx * r / s);
    const Complex xi(c, z.imag() + r);
    for (std::size_t i = 0; i < act.a.size(); ++i) l += act.m[i] * std::log(xi - act.a[i]);
    return l;
  }

  double re_log_f(double r) const {
    double v = -r * r / (2.0 * s);
    const double y = z.imag() + r;
    for (std::size_t i = 0; i < act.a.size(); ++i) {
      const double e = c - act.a[i];
      v += 0.5 * act.m[i] * std::log(e * e + y * y);
    }
    return v;
  }

  double bound(double r1, double r2) const {
    if (r2 == kInf) return z.imag() + r1 >= y_plus ? re_log_f(r1) : kInf;
    if (r1 == -kInf) return z.imag() + r2 <= y_minus ? re_log_f(r2) : kInf;
    const double y1 = z.imag() + r1;
    const double y2 = z.imag() + r2;
    const double ymax2 = std::max(y1 * y1, y2 * y2);
    const double rc = distance_to(0.0, r1, r2);
    double b = -rc * rc / (2.0 * s);
    for (std::size_t i = 0; i < act.a.size(); ++i) {
      const double e = c - act.a[i];
      b += 0.5 * act.m[i] * std::log(e * e + ymax2);
    }
    return b;
  }

  LogLine line(const std::vector<Complex>& sad) const {
    LogLine l;
    l.log_integrand = [this](double r) { return log_f(r); };
    l.upper_bound = [this](double r1, double r2) { return bound(r1, r2); };
    l.anchors.push_back(0.0);
    for (const Complex& x : sad) l.anchors.push_back(x.imag() - z.imag());
    l.resolution = 0.25 * std::sqrt(s);
    return l;
  }
};

// Integrand of the AICP along u = (Re z + r) + i c.
struct InverseLine {
  const Active& act;
  double s;
  Complex z;
  double c;

  // (c - Im z)^2 / 2s, kept out of log_f as for PolyLine.
  double constant() const {
    const double dy = c - z.imag();
    return dy * dy / (2.0 * s);
  }

  Complex log_f(double r) const {
    Complex l(-r * r / (2.0 * s), -r * (c - z.imag()) / s);
    const Complex u(z.real() + r, c);
    for (std::size_t i = 0; i < act.a.size(); ++i) l -= act.m[i] * std::log(u - act.a[i]);
    return l;
  }

  double bound(double r1, double r2) const {
    const double d0 = distance_to(0.0, r1, r2);
    double b = -d0 * d0 / (2.0 * s);
    for (std::size_t i = 0; i < act.a.size(); ++i) {
      const double d = distance_to(act.a[i] - z.real(), r1, r2);
      b -= 0.5 * act.m[i] * std::log(d * d + c * c);
    }
    return b;
  }

  LogLine line(const std::vector<Complex>& sad) const {
    LogLine l;
    l.log_integrand = [this](double r) { return log_f(r); };
    l.upper_bound = [this](double r1, double r2) { return bound(r1, r2); };
    l.anchors.push_back(0.0);
    for (double a : act.a) l.anchors.push_back(a - z.real());
    for (const Complex& x : sad) l.anchors.push_back(x.real() - z.real());
    const double pole_scale = std::abs(c) / std::sqrt(std::max(1.0, act.max_power));
    l.resolution = 0.25 * std::min(std::sqrt(s), pole_scale);
    return l;
  }
};

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be positive");
}

void check_z(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("z must be finite");
}

}  // namespace

const char* to_string(EvaluationMethod m) {
  switch (m) {
    case EvaluationMethod::quadrature: return "quadrature";
    case EvaluationMethod::recurrence: return "recurrence";
    case EvaluationMethod::cauchy_transform: return "cauchy-transform";
    case EvaluationMethod::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

WeightedRoots WeightedRoots::from(const SourceSpectrum& source) {
  return {source.eigenvalues(), source.multiplicities()};
}

int WeightedRoots::degree() const {
  int d = 0;
  for (int m : powers) d += m;
  return d;
}

PolynomialEvaluation smoothed_polynomial(const WeightedRoots& roots, double variance, Complex z) {
  if (!(variance > 0.0)) throw DomainError("variance must be positive");
  check_z(z);
  const Active act = active_of(roots);
  PolynomialEvaluation out;
  if (act.a.empty()) {
    out.value = LogComplex(Complex(1.0, 0.0));
    return out;
  }
  const std::vector<Complex> sad = saddles(act, variance, z);

  std::vector<double> cands{z.real()};
  for (const Complex& x : sad) cands.push_back(x.real());
  const double spread = 2.0 * std::sqrt(variance * (act.total + 1.0));
  const double lo = *std::min_element(cands.begin(), cands.end()) - spread;
  const double hi = *std::max_element(cands.begin(), cands.end()) + spread;
  auto peak = [&](double c) {
    const PolyLine pl(act, variance, z, c);
    return profile_log_line(pl.line(sad), kCut).max_log + pl.constant();
  };
  const double c = minimise(cands, lo, hi, peak);

  const PolyLine pl(act, variance, z, c);
  const LogLine line = pl.line(sad);
  const LineProfile prof = profile_log_line(line, kCut);
  const LogQuadratureResult q = integrate_log_line(line, prof);
  out.value = q.value * LogComplex::from_log(Complex(log_gauss_norm(variance) + pl.constant(), 0.0));
  out.error_estimate = q.error_estimate;
  return out;
}

PolynomialEvaluation smoothed_inverse(const WeightedRoots& roots, double variance, Complex z, Side side,
                                      std::optional<double> offset) {
  if (!(variance > 0.0)) throw DomainError("variance must be positive");
  check_z(z);
  const Active act = active_of(roots);
  const double sign = side == Side::upper ? 1.0 : -1.0;
  PolynomialEvaluation out;
  if (act.a.empty()) {
    out.value = LogComplex(Complex(1.0, 0.0));
    return out;
  }
  const std::vector<Complex> sad = saddles(act, variance, z);
  double height = 0.0;
  if (offset) {
    if (!(*offset > 0.0)) throw DomainError("contour offset must be positive");
    height = *offset;
  } else {
    // Minimise over log(height).
    const double sigma = std::sqrt(variance);
    const double top = std::abs(z.imag()) + 4.0 * std::sqrt(variance * (act.total + 1.0)) + sigma;
    std::vector<double> cands;
    for (const Complex& x : sad)
      if (sign * x.imag() > 0.0) cands.push_back(std::log(std::clamp(std::abs(x.imag()), 0.125 * sigma, 2.0 * top)));
    for (double h = 0.125 * sigma; h <= 2.0 * top; h *= std::numbers::sqrt2) cands.push_back(std::log(h));
    auto peak = [&](double t) {
      const InverseLine il{act, variance, z, sign * std::exp(t)};
      return profile_log_line(il.line(sad), kCut).max_log + il.constant();
    };
    height = std::exp(minimise(cands, std::log(0.125 * sigma), std::log(2.0 * top), peak));
  }
  const InverseLine il{act, variance, z, sign * height};
  const LogLine line = il.line(sad);
  const LineProfile prof = profile_log_line(line, kCut);
  const LogQuadratureResult q = integrate_log_line(line, prof);
  out.value = q.value * LogComplex::from_log(Complex(log_gauss_norm(variance) + il.constant(), 0.0));
  out.error_estimate = q.error_estimate;
  return out;
}

PolynomialEvaluation acp(const SourceSpectrum& source, double tau, Complex z) {
  check_tau(tau);
  return smoothed_polynomial(WeightedRoots::from(source), tau / source.dimension(), z);
}

PolynomialEvaluation acp_exact_rule(const SourceSpectrum& source, double tau, Complex z) {
  check_tau(tau);
  check_z(z);
  const double variance = tau / source.dimension();
  auto f = [&](Complex q) {
    const Complex xi = Complex(0.0, -1.0) * q;
    Complex p(1.0, 0.0);
    for (const auto& e : source.entries()) p *= std::pow(xi - e.eigenvalue, e.multiplicity);
    return p;
  };
  const QuadratureResult r =
      integrate_gaussian_line(f, Complex(0.0, 1.0) * z, variance, source.dimension());
  PolynomialEvaluation out;
  out.value = LogComplex(r.value / std::sqrt(2.0 * std::numbers::pi * variance));
  return out;
}

PolynomialEvaluation acp_hermite_recurrence(int n, double tau, Complex z) {
  check_tau(tau);
  if (n < 0) throw DomainError("N must be nonnegative");
  PolynomialEvaluation out;
  out.method = EvaluationMethod::recurrence;
  if (n == 0) {
    out.value = LogComplex(Complex(1.0, 0.0));
    return out;
  }
  const double step = tau / std::max(n, 1);
  Complex prev(1.0, 0.0);
  Complex cur = z;
  double scale = 0.0;
  for (int k = 1; k < n; ++k) {
    const Complex next = z * cur - (k * step) * prev;
    prev = cur;
    cur = next;
    const double mag = std::max(std::abs(cur), std::abs(prev));
    if (mag > 1e100) {
      prev /= mag;
      cur /= mag;
      scale += std::log(mag);
    }
  }
  out.value = LogComplex::from_parts(cur, scale);
  return out;
}

PolynomialEvaluation aicp(const SourceSpectrum& source, double tau, Complex z, const AicpOptions& opts) {
  check_tau(tau);
  check_z(z);
  if (z.imag() == 0.0)
    throw DomainError("aicp: Im z = 0; pick a side explicitly with aicp_boundary");
  if (opts.contour_offset && std::abs(z.imag()) < 2.0 * *opts.contour_offset) {
    std::ostringstream os;
    os << "aicp: |Im z| = " << std::abs(z.imag()) << " is below twice the contour offset " << *opts.contour_offset;
    throw DomainError(os.str());
  }
  return smoothed_inverse(WeightedRoots::from(source), tau / source.dimension(), z,
                          z.imag() > 0.0 ? Side::upper : Side::lower, opts.contour_offset);
}

PolynomialEvaluation aicp_boundary(const SourceSpectrum& source, double tau, Complex z, Side side) {
  check_tau(tau);
  return smoothed_inverse(WeightedRoots::from(source), tau / source.dimension(), z, side);
}

PolynomialEvaluation aicp_cauchy_null(int n, double tau, Complex z) {
  check_tau(tau);
  check_z(z);
  if (n < 1) throw DomainError("N must be >= 1");
  if (z.imag() == 0.0) throw DomainError("aicp_cauchy_null: Im z = 0");
  const double variance = tau / n;
  const double sigma = std::sqrt(variance);
  // p_{N-1}(s) exp(-s^2 / 2 variance) / (z - s) on a line shifted away from the pole at s = z.
  const bool far = std::abs(z) > std::sqrt(tau);
  auto f = [&](Complex s) {
    Complex prev(1.0, 0.0);
    Complex cur = n > 1 ? s : prev;
    for (int k = 1; k + 1 < n; ++k) {
      const Complex next = s * cur - (k * variance) * prev;
      prev = cur;
      cur = next;
    }
    // p_{N-1} is orthogonal to every lower power of s, so away from the origin the kernel
    // 1/(z - s) can be replaced by its remainder (s/z)^{N-1}/(z - s), which avoids the
    // cancellation of the plain form.
    const Complex kernel = far ? std::pow(s / z, n - 1) / (z - s) : 1.0 / (z - s);
    return cur * std::exp(-s * s / (2.0 * variance)) * kernel;
  };
  const double shift = z.imag() > 0.0 ? -sigma : sigma;
  const double half_width = sigma * (std::sqrt(90.0) + 3.0 * std::sqrt(static_cast<double>(n)));
  const QuadratureResult r = integrate_contour(f, ShiftedLine{shift, 0.0, half_width, 256});
  double log_c2 = 0.5 * std::log(2.0 * std::numbers::pi * variance) + (n - 1) * std::log(variance);
  log_c2 += std::lgamma(static_cast<double>(n));
  PolynomialEvaluation out;
  out.method = EvaluationMethod::cauchy_transform;
  out.value = LogComplex(r.value) / LogComplex::from_log(Complex(log_c2, 0.0));
  out.error_estimate = std::abs(r.value) > 0.0 ? r.error_estimate / std::abs(r.value) : 0.0;
  return out;
}

PdeResidual pde_residual(Evaluator evaluator, const SourceSpectrum& source, double tau, Complex z, double h_z,
                         double h_tau, DiffusionSign sign) {
  check_tau(tau);
  if (!(h_z > 0.0) || !(h_tau > 0.0)) throw DomainError("finite-difference steps must be positive");
  if (!(tau - h_tau > 0.0)) throw DomainError("tau - h_tau must stay positive");
  if (evaluator == Evaluator::aicp && z.imag() == 0.0)
    throw DomainError("pde_residual: aicp stencil touches the real axis");
  auto eval = [&](Complex zz, double tt) {
    return evaluator == Evaluator::acp ? acp(source, tt, zz).value : aicp(source, tt, zz).value;
  };
  const LogComplex f0 = eval(z, tau);
  if (f0.is_zero()) throw DomainError("pde_residual: value vanishes at the stencil centre");
  auto rel = [&](Complex zz, double tt) { return ratio(eval(zz, tt), f0); };

  auto d_tau = [&](double h) { return (rel(z, tau + h) - rel(z, tau - h)) / (2.0 * h); };
  auto d_zz = [&](double h) { return (rel(z + h, tau) - 2.0 + rel(z - h, tau)) / (h * h); };
  const Complex dt = (4.0 * d_tau(0.5 * h_tau) - d_tau(h_tau)) / 3.0;
  const Complex dzz = (4.0 * d_zz(0.5 * h_z) - d_zz(h_z)) / 3.0;

  double coef = 1.0 / (2.0 * source.dimension());
  if (evaluator == Evaluator::aicp) coef = -coef;
  if (sign == DiffusionSign::reversed) coef = -coef;
  return {dt + coef * dzz, f0};
}

Complex cole_hopf(const SourceSpectrum& source, double tau, Complex z, double h_z) {
  check_tau(tau);
  if (!(h_z > 0.0)) throw DomainError("h_z must be positive");
  auto log_ratio = [&](double h) {
    const LogComplex plus = acp(source, tau, z + h).value;
    const LogComplex minus = acp(source, tau, z - h).value;
    if (plus.is_zero() || minus.is_zero()) throw DomainError("cole_hopf: pi_N vanishes on the stencil");
    const Complex l = (plus / minus).log();
    if (std::abs(l.imag()) > 0.5 * std::numbers::pi)
      throw DomainError("cole_hopf: a zero of pi_N lies inside the stencil");
    return l / (2.0 * h);
  };
  const Complex d = (4.0 * log_ratio(0.5 * h_z) - log_ratio(h_z)) / 3.0;
  return d / static_cast<double>(source.dimension());
}

}  // namespace hermdiff
