#include "hermdiff/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hermdiff/polynomial.hpp"

namespace hermdiff {

namespace {

struct Weighted {
  std::vector<double> a;
  std::vector<double> w;
};

Weighted weights_of(const SourceSpectrum& source) {
  Weighted out;
  const double n = source.dimension();
  for (const auto& e : source.entries()) {
    out.a.push_back(e.eigenvalue);
    out.w.push_back(e.multiplicity / n);
  }
  return out;
}

bool root_less(Complex x, Complex y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); }

void check_tau(double tau) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
}

// Newton on z - xi - tau G0(xi).
Complex polish(const SourceSpectrum& source, double tau, Complex z, Complex xi) {
  for (int it = 0; it < 8; ++it) {
    const Complex f = xi + tau * green0(source, xi) - z;
    const Complex df = 1.0 + tau * green0_derivative(source, xi);
    if (df == Complex(0.0, 0.0)) break;
    const Complex next = xi - f / df;
    if (!(std::abs(next + tau * green0(source, next) - z) < std::abs(f))) break;
    xi = next;
  }
  return xi;
}

}  // namespace

Complex green0(const SourceSpectrum& source, Complex xi) {
  const double n = source.dimension();
  Complex g{};
  for (const auto& e : source.entries()) {
    if (xi == Complex(e.eigenvalue, 0.0)) {
      std::ostringstream os;
      os << "green0: xi = " << e.eigenvalue << " is a pole";
      throw DomainError(os.str());
    }
    g += (e.multiplicity / n) / (xi - e.eigenvalue);
  }
  return g;
}

Complex green0_derivative(const SourceSpectrum& source, Complex xi) {
  const double n = source.dimension();
  Complex g{};
  for (const auto& e : source.entries()) {
    const Complex d = xi - e.eigenvalue;
    if (d == Complex(0.0, 0.0)) throw DomainError("green0_derivative: xi is a pole");
    g -= (e.multiplicity / n) / (d * d);
  }
  return g;
}

GreenEvaluation solve_characteristics(const SourceSpectrum& source, double tau, Complex z) {
  check_tau(tau);
  const Weighted wt = weights_of(source);
  const double side = z.imag() < 0.0 ? -1.0 : 1.0;
  const double reach = 10.0 * (1.0 + std::abs(z) + source.max_abs() + std::sqrt(tau));
  auto path = [&](double t) { return Complex(z.real(), z.imag() + side * reach * (1.0 - t)); };

  auto roots_at = [&](Complex zz) { return poly_roots(characteristic_polynomial(wt.a, wt.w, tau, zz)); };

  // At the far end the physical root is the one near zz (the others sit near the sources).
  Complex zz = path(0.0);
  std::vector<Complex> roots = roots_at(zz);
  Complex xi = *std::min_element(roots.begin(), roots.end(), [&](Complex p, Complex q) {
    return std::abs(p - zz) < std::abs(q - zz);
  });

  double t = 0.0;
  double dt = 0.05;
  while (t < 1.0) {
    const double t_next = std::min(1.0, t + dt);
    const Complex z_next = path(t_next);
    const Complex slope = 1.0 + tau * green0_derivative(source, xi);
    const Complex predicted = xi + (z_next - zz) / slope;
    std::vector<Complex> cand = roots_at(z_next);
    std::sort(cand.begin(), cand.end(), [&](Complex p, Complex q) {
      return std::abs(p - predicted) < std::abs(q - predicted);
    });
    const double d1 = std::abs(cand[0] - predicted);
    const double d2 = cand.size() > 1 ? std::abs(cand[1] - predicted) : std::numeric_limits<double>::infinity();
    const bool close = cand.size() > 1 && std::abs(cand[0] - cand[1]) < 1e-12 * (1.0 + std::abs(cand[0]));
    if (close && t_next < 1.0) {
      throw BranchAmbiguityError("characteristic roots collide along the homotopy path", {cand[0], cand[1]});
    }
    if (d1 < 0.3 * d2 || (close && t_next == 1.0)) {
      t = t_next;
      zz = z_next;
      xi = cand[0];
      roots = std::move(cand);
      dt = std::min(0.25, 2.0 * dt);
    } else {
      dt *= 0.5;
      if (dt < 1e-13) throw BranchAmbiguityError("cannot separate characteristic roots", {cand[0], cand[1]});
    }
  }

  xi = polish(source, tau, z, xi);
  if (z.imag() == 0.0) {
    if (std::abs(xi.imag()) > 1e-9 * (1.0 + std::abs(xi))) {
      std::ostringstream os;
      os << "z = " << z.real() << " lies on the spectral support at tau = " << tau;
      throw DomainError(os.str());
    }
    xi = Complex(xi.real(), 0.0);
  }

  GreenEvaluation out;
  out.label = xi;
  out.value = green0(source, xi);
  out.residual = std::abs(z - xi - tau * out.value);
  std::sort(roots.begin(), roots.end(), root_less);
  const auto it = std::min_element(roots.begin(), roots.end(), [&](Complex p, Complex q) {
    return std::abs(p - xi) < std::abs(q - xi);
  });
  out.root_index = static_cast<int>(it - roots.begin());
  return out;
}

CausticSet caustics(const SourceSpectrum& source, double tau) {
  check_tau(tau);
  CausticSet out;
  std::vector<double> labels;
  if (source.distinct() == 1) {
    const double a = source.entries()[0].eigenvalue;
    labels = {a - std::sqrt(tau), a + std::sqrt(tau)};
  } else if (source.is_symmetric_pair()) {
    // (xi^2 - a^2)^2 = tau (xi^2 + a^2) as a quadratic in w = xi^2.
    const double a = source.pair_half_gap();
    const double a2 = a * a;
    const double b = 2.0 * a2 + tau;
    const double w_plus = 0.5 * (b + std::sqrt(tau * tau + 8.0 * a2 * tau));
    const double w_minus = a2 * (a2 - tau) / w_plus;
    const double outer = std::sqrt(w_plus);
    labels.push_back(-outer);
    if (w_minus > 0.0) {
      const double inner = std::sqrt(w_minus);
      labels.push_back(-inner);
      labels.push_back(inner);
    } else if (w_minus == 0.0) {
      labels.push_back(0.0);
    }
    labels.push_back(outer);
    out.merged = w_minus <= 0.0;
  } else {
    const Weighted wt = weights_of(source);
    const std::vector<Complex> roots = poly_roots(caustic_polynomial(wt.a, wt.w, tau));
    for (const Complex& r : roots) {
      if (std::abs(r.imag()) > 1e-7 * (1.0 + std::abs(r))) continue;
      // Real Newton on 1 + tau G0'(xi).
      double x = r.real();
      for (int it = 0; it < 30; ++it) {
        double h = 1.0;
        double dh = 0.0;
        for (std::size_t i = 0; i < wt.a.size(); ++i) {
          const double d = x - wt.a[i];
          h -= tau * wt.w[i] / (d * d);
          dh += 2.0 * tau * wt.w[i] / (d * d * d);
        }
        if (dh == 0.0) break;
        const double step = h / dh;
        x -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
      }
      labels.push_back(x);
    }
    std::sort(labels.begin(), labels.end());
    std::vector<double> distinct;
    for (double x : labels)
      if (distinct.empty() || std::abs(x - distinct.back()) > 1e-9 * (1.0 + std::abs(x))) distinct.push_back(x);
    out.merged = distinct.size() < labels.size() || distinct.size() < 2 * source.distinct();
    labels = std::move(distinct);
  }
  for (double xi : labels) {
    out.labels.push_back(xi);
    out.positions.push_back(xi + tau * green0(source, Complex(xi, 0.0)).real());
  }
  return out;
}

std::vector<std::pair<double, double>> support_intervals(const SourceSpectrum& source, double tau) {
  const CausticSet c = caustics(source, tau);
  std::vector<double> z = c.positions;
  // A coalesced pair contributes one touching point; drop it so edges pair up.
  if (z.size() % 2 == 1) {
    const std::size_t mid = z.size() / 2;
    z.erase(z.begin() + static_cast<std::ptrdiff_t>(mid));
  }
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k + 1 < z.size(); k += 2) out.emplace_back(z[k], z[k + 1]);
  return out;
}

double density(const SourceSpectrum& source, double tau, double lambda) {
  check_tau(tau);
  bool inside = false;
  for (const auto& [lo, hi] : support_intervals(source, tau))
    if (lambda > lo && lambda < hi) inside = true;
  if (!inside) return 0.0;
  const double eps = 1e-6 * (std::sqrt(tau) + source.max_abs());
  auto g = [&](double e) {
    return std::abs(solve_characteristics(source, tau, Complex(lambda, -e)).value.imag()) / std::numbers::pi;
  };
  return std::max(0.0, 2.0 * g(0.5 * eps) - g(eps));
}

MergePoint merge_point(const SourceSpectrum& source) {
  (void)source.pair_half_gap();
  auto merged = [&](double tau) { return caustics(source, tau).merged; };
  double hi = 1.0;
  while (!merged(hi)) hi *= 2.0;
  double lo = 0.5 * hi;
  while (merged(lo)) {
    hi = lo;
    lo *= 0.5;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (merged(mid) ? hi : lo) = mid;
  }
  const CausticSet before = caustics(source, lo);
  MergePoint out;
  out.tau_c = hi;
  if (before.positions.size() == 4) out.z_c = 0.5 * (before.positions[1] + before.positions[2]);
  return out;
}

}  // namespace hermdiff
