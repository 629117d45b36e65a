#include "hermdiff/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hermdiff/parallel.hpp"
#include "hermdiff/quadrature.hpp"

namespace hermdiff {

namespace {

constexpr double pi = std::numbers::pi;
const Complex I{0.0, 1.0};

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be positive");
}

void check_multiplicities(const SourceSpectrum& source, const Multiplicities& m) {
  if (m.size() != source.distinct()) {
    std::ostringstream os;
    os << "multiplicity vector has " << m.size() << " entries, source has " << source.distinct();
    throw PreconditionError(os.str());
  }
  for (int v : m)
    if (v < 0) throw PreconditionError("multiplicities must be nonnegative");
}

void check_pair(double a, int n) {
  if (!(a > 0.0)) throw DomainError("a must be positive");
  if (n < 2 || n % 2 != 0) throw PreconditionError("N must be even and positive");
}

}  // namespace

void MultiplicityChain::validate() const {
  const auto& target = base.multiplicities();
  const std::size_t n = static_cast<std::size_t>(base.dimension());
  if (sequence.size() != n + 1) throw PreconditionError("chain must have N + 1 entries");
  for (std::size_t i = 0; i <= n; ++i) {
    const Multiplicities& v = sequence[i];
    if (v.size() != target.size()) throw PreconditionError("chain entry has the wrong dimension");
    if (static_cast<std::size_t>(std::accumulate(v.begin(), v.end(), 0)) != i)
      throw PreconditionError("chain entry norm differs from its index");
    // Nested fill: coordinates before the first incomplete one are full, those after are zero.
    std::size_t k = 0;
    while (k < v.size() && v[k] == target[k]) ++k;
    for (std::size_t j = k + 1; j < v.size(); ++j)
      if (v[j] != 0) throw PreconditionError("chain is not filled in source order");
    if (k < v.size() && v[k] > target[k]) throw PreconditionError("chain entry exceeds the source multiplicity");
  }
  if (sequence.back() != target) throw PreconditionError("chain must end at the source multiplicities");
}

MultiplicityChain build_chain(const SourceSpectrum& source) {
  MultiplicityChain chain{source, {}};
  const auto target = source.multiplicities();
  Multiplicities cur(target.size(), 0);
  chain.sequence.push_back(cur);
  for (std::size_t k = 0; k < target.size(); ++k) {
    while (cur[k] < target[k]) {
      ++cur[k];
      chain.sequence.push_back(cur);
    }
  }
  return chain;
}

Complex theta_fn(const SourceSpectrum& source, const Multiplicities& m, double tau, double x) {
  check_tau(tau);
  check_multiplicities(source, m);
  const std::vector<double> a = source.eigenvalues();
  const double n = source.dimension();
  const double sigma = std::sqrt(tau / n);
  auto f = [&](Complex u) {
    Complex v = std::exp(-(u - x) * (u - x) / (2.0 * sigma * sigma));
    for (std::size_t i = 0; i < a.size(); ++i)
      if (m[i] > 0) v /= std::pow(u - a[i], m[i]);
    return v;
  };
  Complex total{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (m[i] == 0) continue;
    // Radius near the Gaussian width (optimal for the Laurent coefficient), kept clear of
    // neighbouring sources.
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a.size(); ++j)
      if (j != i) gap = std::min(gap, std::abs(a[j] - a[i]));
    const double radius = std::min(0.45 * gap, sigma * std::sqrt(static_cast<double>(m[i])));
    total += integrate_contour(f, ClosedLoop{a[i], radius, 64, Orientation::clockwise}).value;
  }
  return total / (std::sqrt(2.0 * pi) * sigma);
}

Complex pi_fn(const SourceSpectrum& source, const Multiplicities& m, double tau, double x) {
  check_tau(tau);
  check_multiplicities(source, m);
  const int degree = std::accumulate(m.begin(), m.end(), 0);
  if (degree == 0) return 1.0;
  const std::vector<double> a = source.eigenvalues();
  const double variance = tau / source.dimension();
  auto f = [&](Complex q) {
    const Complex xi = -I * q;
    Complex p(1.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) p *= std::pow(xi - a[i], m[i]);
    return p;
  };
  return integrate_gaussian_line(f, I * x, variance, degree).value / std::sqrt(2.0 * pi * variance);
}

Complex kernel(const SourceSpectrum& source, double tau, double x, double y) {
  check_tau(tau);
  const MultiplicityChain chain = build_chain(source);
  const std::size_t n = chain.sequence.size() - 1;
  std::vector<Complex> terms(n);
  parallel_for(n, [&](std::size_t i) {
    terms[i] = theta_fn(source, chain.sequence[i + 1], tau, x) * pi_fn(source, chain.sequence[i], tau, y);
  });
  return pairwise_sum(terms.data(), terms.size());
}

Complex kernel_bh(double a, int n, double tau, double x, double y) {
  check_pair(a, n);
  check_tau(tau);
  const double nd = n;
  const int half = n / 2;
  const double variance = tau / nd;
  const double half_width = 2.0 * std::sqrt(tau + a * a) + 2.0 * truncation_half_width(variance);

  // q-integral along Im q = c, moved towards the Gaussian centre i y but kept short of the
  // pole q = i u, which sits at Im q = Re u on the far side of the real axis.
  const double clearance = std::max(0.25 * a, 0.5 * std::sqrt(variance));
  auto inner = [&](Complex u, bool right) {
    const double c = right ? std::min(y, u.real() - clearance) : std::max(y, u.real() + clearance);
    const ComplexFn g = [&](Complex q) {
      const Complex d = u + I * q;
      if (std::abs(d) < 1e-6) throw ConfigurationError("kernel_bh: u + i q nearly vanishes; change the u-loop");
      const Complex w = q - I * y;
      return std::pow(-q * q - a * a, half) / d * std::exp(-w * w / (2.0 * variance));
    };
    return integrate_contour(g, ShiftedLine{c, 0.0, half_width, 129}).value;
  };
  auto outer = [&](bool right) {
    const ComplexFn f = [&, right](Complex u) {
      const Complex w = u - x;
      return inner(u, right) * std::exp(-w * w / (2.0 * variance)) / std::pow(u * u - a * a, half);
    };
    return integrate_contour(f, ClosedLoop{right ? a : -a, 0.5 * a, 32, Orientation::clockwise}).value;
  };
  return -(nd / (2.0 * pi * tau)) * (outer(true) + outer(false));
}

SumIdentity source_sum_identity(Complex q, Complex u, double a, int n) {
  check_pair(a, n);
  if (u == Complex(a) || u == Complex(-a)) throw DomainError("source_sum_identity: u is a source eigenvalue");
  if (u + I * q == Complex(0.0)) throw DomainError("source_sum_identity: u = -i q");
  const int half = n / 2;
  auto geometric = [&](Complex num, Complex den) {
    Complex s{};
    Complex r = 1.0 / den;
    for (int j = 0; j < half; ++j) {
      s += r;
      r *= num / den;
    }
    return s;
  };
  const Complex lead = -I * q - a;
  const Complex lhs = geometric(lead, u - a) + std::pow(lead / (u - a), half) * geometric(-I * q + a, u + a);
  const Complex rhs = (1.0 - std::pow(-q * q - a * a, half) / std::pow(u * u - a * a, half)) / (u + I * q);
  return {lhs, rhs};
}

}  // namespace hermdiff
