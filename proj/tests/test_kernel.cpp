#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hermdiff/analytic.hpp"
#include "hermdiff/kernel.hpp"

using namespace hermdiff;

namespace {

const Complex I{0.0, 1.0};

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("multiplicity chain") {
  const MultiplicityChain c = build_chain(SourceSpectrum::parse("-1:2,1:2"));
  const std::vector<Multiplicities> want{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}};
  CHECK(c.sequence == want);
  CHECK_NOTHROW(c.validate());

  MultiplicityChain bad = c;
  bad.sequence[2] = {1, 1};
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad = c;
  bad.sequence.pop_back();
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad = c;
  bad.sequence[1] = {0, 0};
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("theta_fn") {
  const SourceSpectrum two = SourceSpectrum::parse("-1:2,1:2");
  CHECK(std::abs(theta_fn(two, {0, 0}, 1.0, 0.3)) < 1e-12);
  // Clockwise loop around the single pole of exp(-u^2/2)/u: -2 pi i / sqrt(2 pi).
  CHECK(std::abs(theta_fn(SourceSpectrum::null(1), {1}, 1.0, 0.0) - Complex(0.0, -std::sqrt(2 * std::numbers::pi))) <
        1e-10);
  CHECK_THROWS_AS(theta_fn(two, {1}, 1.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(theta_fn(two, {1, -1}, 1.0, 0.0), PreconditionError);
}

TEST_CASE("theta_fn is the jump of theta across the real axis") {
  const SourceSpectrum two = SourceSpectrum::parse("-1:2,1:2");
  const double delta = 1e-4;
  for (double x : {-1.3, 0.15, 0.4, 2.0}) {
    auto jump = [&](double d) {
      return aicp(two, 1.0, Complex(x, d)).to_complex() - aicp(two, 1.0, Complex(x, -d)).to_complex();
    };
    const Complex extrapolated = 2.0 * jump(0.5 * delta) - jump(delta);
    const Complex t = theta_fn(two, {2, 2}, 1.0, x);
    CAPTURE(x);
    CHECK(rel(extrapolated, t) < 1e-6);
    const Complex b = aicp_boundary(two, 1.0, x, Side::upper).to_complex() -
                      aicp_boundary(two, 1.0, x, Side::lower).to_complex();
    CHECK(rel(b, t) < 1e-9);
  }
}

TEST_CASE("pi_fn") {
  const SourceSpectrum two = SourceSpectrum::parse("-1:2,1:2");
  CHECK(pi_fn(two, {0, 0}, 1.0, 0.7) == Complex(1.0));
  for (int n : {1, 4, 9}) {
    const Complex p = pi_fn(SourceSpectrum::null(n), {n}, 0.8, 0.6);
    const Complex r = acp_hermite_recurrence(n, 0.8, 0.6).to_complex();
    CAPTURE(n);
    CHECK(std::abs(p - r) < 1e-11 * std::max(1.0, std::abs(r)));
  }
  const double x = 0.35;
  CHECK(std::abs(pi_fn(two, {2, 1}, 1e-30, x) - (x + 1) * (x + 1) * (x - 1)) < 1e-14);
  const double big = 1e4;
  CHECK(std::abs(pi_fn(two, {2, 1}, 1.0, big) / std::pow(big, 3) - 1.0) < 1e-3);
  CHECK(std::abs(pi_fn(two, {1, 1}, 1.0, big) / std::pow(big, 2) - 1.0) < 1e-6);
}

TEST_CASE("kernel equals the double-integral form") {
  const SourceSpectrum n2 = SourceSpectrum::parse("-1:1,1:1");
  for (double x : {-0.8, 0.0, 0.9})
    for (double y : {-0.5, 0.1, 1.2}) {
      CAPTURE(x);
      CAPTURE(y);
      CHECK(rel(kernel(n2, 1.0, x, y), kernel_bh(1.0, 2, 1.0, x, y)) < 1e-6);
    }
  const SourceSpectrum n4 = SourceSpectrum::parse("-1:2,1:2");
  const Complex k = kernel(n4, 1.0, 0.3, -0.2);
  CHECK(rel(k, kernel_bh(1.0, 4, 1.0, 0.3, -0.2)) < 1e-6);
  CHECK(std::abs(kernel_bh(1.0, 4, 1.0, -0.3, 0.2) - kernel_bh(1.0, 4, 1.0, 0.3, -0.2)) < 1e-8 * std::abs(k));
  CHECK(std::abs(kernel(n4, 1.0, -0.3, 0.2) - k) < 1e-8 * std::abs(k));
}

TEST_CASE("kernel_bh: small separation approaches the null-source kernel") {
  for (auto [x, y] : {std::pair{0.2, -0.4}, {0.0, 0.0}, {1.0, 0.5}}) {
    const Complex near = kernel_bh(1e-4, 2, 1.0, x, y);
    const Complex hermite = kernel(SourceSpectrum::null(2), 1.0, x, y);
    CHECK(std::abs(near - hermite) < 1e-4 * std::max(1.0, std::abs(hermite)));
  }
  CHECK_THROWS_AS(kernel_bh(1.0, 3, 1.0, 0.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(kernel_bh(0.0, 2, 1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("source sum identity") {
  const SumIdentity s = source_sum_identity(0.3, 2.0 * I, 1.0, 2);
  CHECK(std::abs(s.lhs - s.rhs) < 1e-12);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  double worst = 0.0;
  int trials = 0;
  while (trials < 100) {
    const Complex q(c(rng), c(rng)), u(c(rng), c(rng));
    if (std::abs(u - 1.0) < 0.2 || std::abs(u + 1.0) < 0.2 || std::abs(u + I * q) < 0.2) continue;
    const SumIdentity r = source_sum_identity(q, u, 1.0, 8);
    worst = std::max(worst, std::abs(r.lhs - r.rhs));
    ++trials;
  }
  CHECK(worst < 1e-10);

  const Complex far(1e6, 0.0);
  const SumIdentity a = source_sum_identity(0.5, far, 1.0, 4);
  CHECK(std::abs(far * a.lhs - 1.0) < 1e-5);
  CHECK(std::abs(far * a.rhs - 1.0) < 1e-5);

  CHECK_THROWS_AS(source_sum_identity(0.3, 1.0, 1.0, 2), DomainError);
  CHECK_THROWS_AS(source_sum_identity(I, 1.0, 1.0, 2), DomainError);
}
