#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hermdiff/spectral_flow.hpp"
#include "oracles.hpp"

using namespace hermdiff;

namespace {

const Complex I{0.0, 1.0};

// Integral of the density over its support, with lambda = l + (r - l)(1 - cos t)/2 to absorb the
// square-root edges, midpoint rule in t.
double total_mass(const SourceSpectrum& src, double tau, int nodes) {
  double mass = 0.0;
  for (auto [l, r] : support_intervals(src, tau)) {
    const double h = std::numbers::pi / nodes;
    for (int k = 0; k < nodes; ++k) {
      const double t = (k + 0.5) * h;
      mass += density(src, tau, l + 0.5 * (r - l) * (1.0 - std::cos(t))) * 0.5 * (r - l) * std::sin(t) * h;
    }
  }
  return mass;
}

double loglog_slope(const SourceSpectrum& src, double tau, double center, double sign, double d1, double d2) {
  const double r1 = density(src, tau, center + sign * d1);
  const double r2 = density(src, tau, center + sign * d2);
  return std::log(r2 / r1) / std::log(d2 / d1);
}

}  // namespace

TEST_CASE("green0") {
  CHECK(std::abs(green0(SourceSpectrum::null(3), 2.0) - 0.5) < 1e-15);
  CHECK(std::abs(green0(SourceSpectrum::symmetric_pair(1.0, 6), 2.0 * I) - Complex(0.0, -0.4)) < 1e-15);
  const SourceSpectrum src = SourceSpectrum::parse("-1:2,0.5:1,2:3");
  const Complex far = std::polar(1e8, 0.3);
  CHECK(std::abs(far * green0(src, far) - 1.0) < 1e-7);
  CHECK_THROWS_AS(green0(src, 0.5), DomainError);
}

TEST_CASE("solve_characteristics: examples") {
  const auto g = solve_characteristics(SourceSpectrum::null(1), 1.0, 3.0);
  CHECK(std::abs(g.value - (3.0 - std::sqrt(5.0)) / 2.0) < 1e-12);
  CHECK(g.residual <= 1e-10 * 3.0);
  const auto g0 = solve_characteristics(SourceSpectrum::null(1), 1.0, Complex(1e-6, 1e-6));
  CHECK(std::abs(g0.value.imag() + 1.0) < 1e-5);
  const Complex z(2.0, 1.0);
  const auto g2 = solve_characteristics(SourceSpectrum::symmetric_pair(1.0, 2), 1e-12, z);
  CHECK(std::abs(g2.value - z / (z * z - 1.0)) < 1e-10);
  CHECK_THROWS_AS(solve_characteristics(SourceSpectrum::null(1), 1.0, 0.5), DomainError);
}

TEST_CASE("solve_characteristics: certificate, Herglotz, conjugation, asymptotics") {
  const SourceSpectrum src = SourceSpectrum::parse("-1:2,0.5:1,2:3");
  for (double tau : {0.1, 0.5, 2.0}) {
    for (Complex z : {Complex(0.3, 0.2), Complex(-1.4, 0.05), Complex(2.5, 1.5), Complex(0.0, 3.0)}) {
      const auto g = solve_characteristics(src, tau, z);
      CHECK(std::abs(z - g.label - tau * green0(src, g.label)) <= 1e-10 * std::max(1.0, std::abs(z)));
      CHECK(g.residual <= 1e-10 * std::max(1.0, std::abs(z)));
      CHECK(g.value.imag() < 0.0);
      const auto gc = solve_characteristics(src, tau, std::conj(z));
      CHECK(std::abs(gc.value - std::conj(g.value)) < 1e-12 * std::abs(g.value));
    }
  }
  const Complex far = std::polar(1e6, 0.4);
  CHECK(std::abs(far * solve_characteristics(src, 1.0, far).value - 1.0) < 1e-5);
}

TEST_CASE("density: semicircle") {
  const SourceSpectrum src = SourceSpectrum::null(1);
  CHECK(std::abs(density(src, 1.0, 0.0) - 1.0 / std::numbers::pi) < 1e-9);
  CHECK(density(src, 1.0, 2.5) == 0.0);
  for (double l : {-1.9, -0.7, 0.3, 1.5})
    CHECK(std::abs(density(src, 1.0, l) - oracle::semicircle(l, 1.0)) < 1e-9);
  CHECK(std::abs(density(src, 2.0, 1.0) - oracle::semicircle(1.0, 2.0)) < 1e-9);
}

TEST_CASE("density: unit mass") {
  CHECK(std::abs(total_mass(SourceSpectrum::null(1), 1.0, 2000) - 1.0) < 1e-4);
  CHECK(std::abs(total_mass(SourceSpectrum::symmetric_pair(1.0, 2), 0.25, 2000) - 1.0) < 1e-4);
  CHECK(std::abs(total_mass(SourceSpectrum::symmetric_pair(1.0, 2), 1.5, 2000) - 1.0) < 1e-4);
}

TEST_CASE("density: edge and cusp exponents") {
  CHECK(std::abs(loglog_slope(SourceSpectrum::null(1), 1.0, 2.0, -1.0, 1e-5, 1e-3) - 0.5) < 0.05);
  CHECK(std::abs(loglog_slope(SourceSpectrum::symmetric_pair(1.0, 2), 1.0, 0.0, 1.0, 1e-6, 1e-4) - 1.0 / 3.0) <
        0.05);
}

TEST_CASE("caustics") {
  const auto c = caustics(SourceSpectrum::null(1), 1.0);
  REQUIRE(c.positions.size() == 2);
  CHECK(std::abs(c.positions[0] + 2.0) < 1e-12);
  CHECK(std::abs(c.positions[1] - 2.0) < 1e-12);
  CHECK(std::abs(caustics(SourceSpectrum::null(1), 4.0).positions[1] - 4.0) < 1e-12);

  const SourceSpectrum two = SourceSpectrum::symmetric_pair(1.0, 2);
  const auto merged = caustics(two, 1.0);
  CHECK(merged.merged);

  const auto early = caustics(two, 0.25);
  CHECK_FALSE(early.merged);
  REQUIRE(early.positions.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(early.positions[k] + early.positions[3 - k]) < 1e-12);
  CHECK(early.positions[1] > -1.0);
  CHECK(early.positions[2] < 1.0);
  CHECK(early.positions[1] < early.positions[2]);
  for (std::size_t k = 0; k < early.labels.size(); ++k) {
    const double xi = early.labels[k];
    CHECK(std::abs(1.0 + 0.25 * green0_derivative(two, xi)) < 1e-10);
    CHECK(std::abs(xi + 0.25 * green0(two, xi) - early.positions[k]) < 1e-10);
  }
}

TEST_CASE("merge_point") {
  for (double a : {0.5, 1.0, 2.0, 1e-3}) {
    const MergePoint m = merge_point(SourceSpectrum::symmetric_pair(a, 2));
    CAPTURE(a);
    CHECK(std::abs(m.z_c) < 1e-12);
    CHECK(std::abs(m.tau_c - a * a) < 1e-8 * std::max(1.0, a * a));
  }
  CHECK(std::abs(merge_point(SourceSpectrum::symmetric_pair(1e-3, 2)).tau_c / 1e-6 - 1.0) < 1e-6);
  CHECK_THROWS_AS(merge_point(SourceSpectrum::parse("-1:1,2:1")), UnsupportedSourceError);
}
