#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>

#include <cmath>
#include <numbers>

#include "hermdiff/scaling.hpp"
#include "oracles.hpp"

using namespace hermdiff;

namespace {

constexpr double pi = std::numbers::pi;

double worst(const std::vector<EdgeSample>& s) {
  double w = 0.0;
  for (const auto& e : s) w = std::max(w, e.rel_error());
  return w;
}

}  // namespace

TEST_CASE("airy: values against the power series") {
  CHECK(std::abs(airy(0.0) - 0.3550280539) < 1e-10);
  CHECK(std::abs(airy(1.0) - oracle::airy_series(1.0)) < 1e-9 * oracle::airy_series(1.0));
  double w = 0.0;
  for (int k = 0; k <= 300; ++k) {
    const double x = -10.0 + 0.05 * k;
    const double ref = oracle::airy_series(x);
    w = std::max(w, std::abs(airy(x) - ref) / std::abs(ref));
  }
  CHECK(w < 1e-9);
}

TEST_CASE("airy: defining equation and range") {
  const double h = 1e-3;
  for (double x : {-2.0, 0.0, 2.0}) {
    const double d2 = (airy(x + h) - 2.0 * airy(x) + airy(x - h)) / (h * h);
    CHECK(std::abs(d2 - x * airy(x)) < 1e-5);
  }
  CHECK(std::abs(airy(30.0) / boost::math::airy_ai(30.0) - 1.0) < 1e-9);
  CHECK(std::abs(airy(-30.0) - boost::math::airy_ai(-30.0)) < 1e-10);
  CHECK_THROWS_AS(airy(30.5), DomainError);
  CHECK_THROWS_AS(airy(Complex(0.0, 9.0)), DomainError);
}

TEST_CASE("airy: complex argument") {
  for (Complex x : {Complex(0.0, 0.0), Complex(1.0, 1.0), Complex(-3.0, 0.5), std::polar(2.5, 2.0 * pi / 3.0),
                    std::polar(4.0, -2.0 * pi / 3.0), Complex(5.0, -2.0)}) {
    const Complex ref = oracle::airy_series(x);
    CAPTURE(x);
    CHECK(std::abs(airy(x) - ref) < 1e-9 * std::abs(ref));
  }
  CHECK(std::abs(airy(Complex(1.3, 0.0)) - airy(1.3)) < 1e-14);
}

TEST_CASE("pearcey: origin, symmetry, realness") {
  const double p0 = oracle::pearcey_origin();
  CHECK(std::abs(pearcey(0.0, 0.0).real() - p0) < 1e-9);
  CHECK(std::abs(oracle::pearcey_real(0.0, 0.0) - p0) < 1e-9);
  for (auto [x, y] : {std::pair{0.5, 1.0}, {-2.0, 3.0}, {3.0, -1.5}, {20.0, 20.0}, {-20.0, 7.0}, {1.0, -20.0}}) {
    const Complex p = pearcey(x, y);
    CAPTURE(x);
    CAPTURE(y);
    CHECK(std::abs(p.imag()) < 1e-12);
    CHECK(pearcey(x, -y) == p);
    CHECK(std::abs(p.real() - oracle::pearcey_real(x, y)) < 1e-9 * std::max(1.0, std::abs(p)));
  }
  CHECK_THROWS_AS(pearcey(21.0, 0.0), DomainError);
}

TEST_CASE("pearcey_contour against deformed rays") {
  const Complex w = std::polar(1.0, pi / 4.0);
  for (auto [x, y] : {std::pair{0.0, 0.0}, {0.5, 1.0}, {-1.0, -2.0}, {2.0, 0.7}}) {
    const auto f = [&](Complex s) {
      return std::exp(-s * s * s * s / 4.0 + Complex(0.0, x) * s * s + w * y * s);
    };
    const Complex o(0.3, 0.3);
    const Complex up = w * (oracle::ray_integral(f, o, -pi / 16.0) - oracle::ray_integral(f, o, 9.0 * pi / 16.0));
    const Complex lo = w * (oracle::ray_integral(f, std::conj(o), -9.0 * pi / 16.0) -
                            oracle::ray_integral(f, std::conj(o), 17.0 * pi / 16.0));
    CAPTURE(x);
    CAPTURE(y);
    CHECK(std::abs(pearcey_contour(x, y, Side::upper) - up) < 1e-9 * std::max(1.0, std::abs(up)));
    CHECK(std::abs(pearcey_contour(x, y, Side::lower) - lo) < 1e-9 * std::max(1.0, std::abs(lo)));
  }
}

TEST_CASE("exponents") {
  CHECK(spacing_exponent(2) == Rational(-2, 3));
  CHECK(spacing_exponent(3) == Rational(-3, 4));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK_THROWS_AS(spacing_exponent(1), DomainError);
  const ScalingWindow e = ScalingWindow::airy_edge(256, 4.0);
  CHECK(e.alpha == Rational(-2, 3));
  CHECK(e.beta == Rational(-1, 3));
  CHECK_FALSE(e.gamma.has_value());
  CHECK(e.z_c == 4.0);
  CHECK(e.order() == 2);
  CHECK(e.identities_hold());
  const ScalingWindow c = ScalingWindow::pearcey_cusp(256, 1.5);
  CHECK(c.alpha == Rational(-3, 4));
  CHECK(c.beta == Rational(-1, 4));
  CHECK(*c.gamma == Rational(-1, 2));
  CHECK(c.tau_c == 2.25);
  CHECK(c.order() == 3);
  CHECK(c.identities_hold());
  for (const ScalingWindow& s : {e, c}) {
    const Rational k(s.order());
    CHECK(s.alpha * (Rational(1) + k) == Rational(0) - k);
    CHECK(s.beta == s.alpha / k);
    CHECK(s.beta == Rational(0) - (Rational(1) + s.alpha));
  }
}

TEST_CASE("acp edge profile") {
  const std::vector<double> etas{-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto at0 = acp_edge_profile(1024, 1.0, {0.0});
  CHECK(std::abs(at0[0].limit - airy(0.0)) < 1e-15);
  CHECK(at0[0].rel_error() < 0.1);
  const auto small = acp_edge_profile(64, 1.0, etas);
  const auto large = acp_edge_profile(1024, 1.0, etas);
  for (std::size_t k = 0; k < etas.size(); ++k) CHECK(large[k].rel_error() < small[k].rel_error());
  // The limit depends on eta / sqrt(tau) only.
  std::vector<double> scaled;
  for (double e : etas) scaled.push_back(2.0 * e);
  const auto wide = acp_edge_profile(256, 4.0, scaled);
  const auto base = acp_edge_profile(256, 1.0, etas);
  for (std::size_t k = 0; k < etas.size(); ++k) {
    CHECK(std::abs(wide[k].rescaled - base[k].rescaled) < 1e-8 * std::abs(base[k].rescaled));
    CHECK(std::abs(wide[k].limit - base[k].limit) < 1e-14);
  }
  CHECK_THROWS_AS(acp_edge_profile(32, 1.0, etas), PreconditionError);
}

TEST_CASE("aicp edge profile") {
  const std::vector<double> etas{-2.0, -1.0, 0.0, 1.0, 2.0};
  const auto up = aicp_edge_profile(1024, 1.0, etas, Side::upper);
  const auto lo = aicp_edge_profile(1024, 1.0, etas, Side::lower);
  for (std::size_t k = 0; k < etas.size(); ++k) {
    CHECK(std::abs(up[k].rescaled - std::conj(lo[k].rescaled)) < 1e-8 * std::abs(up[k].rescaled));
    const Complex want = std::polar(1.0, -pi / 6.0) * airy(std::polar(etas[k], -2.0 * pi / 3.0));
    CHECK(std::abs(up[k].limit - want) < 1e-14);
  }
  CHECK(up[2].rel_error() < 0.15);
  const auto small = aicp_edge_profile(64, 1.0, etas, Side::upper);
  for (std::size_t k = 0; k < etas.size(); ++k) CHECK(up[k].rel_error() < small[k].rel_error());
}

TEST_CASE("acp cusp profile") {
  const auto at0 = acp_cusp_profile(1024, 1.0, {0.0}, {0.0});
  CHECK(std::abs(at0[0].limit.real() - oracle::pearcey_origin()) < 1e-9);
  CHECK(at0[0].rel_error() < 0.1);
  const auto grid = acp_cusp_profile(256, 1.0, {-1.0, 1.0}, {-1.5, 1.5});
  CHECK(grid[0].kappa == -1.0);
  CHECK(grid[1].eta == 1.5);
  CHECK(std::abs(grid[0].rescaled - grid[1].rescaled) < 1e-8 * std::abs(grid[1].rescaled));
  CHECK(std::abs(grid[2].rescaled - grid[3].rescaled) < 1e-8 * std::abs(grid[3].rescaled));
  CHECK(acp_cusp_profile(1024, 1.0, {1.0}, {1.0})[0].rel_error() <
        acp_cusp_profile(256, 1.0, {1.0}, {1.0})[0].rel_error());
  const auto other_a = acp_cusp_profile(256, 2.0, {0.0}, {0.0});
  CHECK(other_a[0].rel_error() < 0.1);
  CHECK_THROWS_AS(acp_cusp_profile(255, 1.0, {0.0}, {0.0}), PreconditionError);
}

TEST_CASE("aicp cusp profile") {
  const auto up = aicp_cusp_profile(1024, 1.0, {0.0, 1.0}, {0.0, 1.0}, Side::upper);
  const auto lo = aicp_cusp_profile(1024, 1.0, {0.0, 1.0}, {0.0, 1.0}, Side::lower);
  for (std::size_t k = 0; k < up.size(); ++k)
    CHECK(std::abs(up[k].rescaled - std::conj(lo[k].rescaled)) < 1e-8 * std::abs(up[k].rescaled));
  CHECK(up[0].rel_error() < 0.15);
  CHECK(std::abs(up[0].limit - pearcey_contour(0.0, 0.0, Side::upper)) < 1e-15);
  const auto small = aicp_cusp_profile(256, 1.0, {1.0}, {1.0}, Side::upper);
  CHECK(up[3].rel_error() < small[0].rel_error());
  CHECK_THROWS_AS(aicp_cusp_profile(7, 1.0, {0.0}, {0.0}, Side::upper), PreconditionError);
}
