#pragma once

// Finite-N kernel K_N(x, y) = sum_i Theta_{n(i+1)}(x) Pi_{n(i)}(y) assembled from type I and
// type II multiple orthogonal functions, and the closed double-integral form for the
// symmetric two-source case.

#include <complex>
#include <vector>

#include "hermdiff/errors.hpp"
#include "hermdiff/source.hpp"

namespace hermdiff {

using Multiplicities = std::vector<int>;

// n(0) = 0, ..., n(N) = source multiplicities, filling coordinates in source order.
struct MultiplicityChain {
  SourceSpectrum base;
  std::vector<Multiplicities> sequence;

  // Throws PreconditionError if any invariant fails.
  void validate() const;
};

MultiplicityChain build_chain(const SourceSpectrum& source);

// sqrt(N/2 pi tau) times the clockwise loop integral of exp(-N (u - x)^2 / 2 tau) prod (u - a_i)^{-m_i}
// around the sources, with N = source.dimension(). This is the jump theta+ - theta- across the
// real axis. The loop is a small circle around each source with m_i > 0.
Complex theta_fn(const SourceSpectrum& source, const Multiplicities& m, double tau, double x);

// sqrt(N/2 pi tau) int dq exp(-N (q - i x)^2 / 2 tau) prod (-i q - a_i)^{m_i}, by the exact
// Gauss-Hermite rule. Monic of degree |m| in x.
Complex pi_fn(const SourceSpectrum& source, const Multiplicities& m, double tau, double x);

// Pairwise sum of the N products along the chain.
Complex kernel(const SourceSpectrum& source, double tau, double x, double y);

// -(N/2 pi tau) oint du int dq (-q^2 - a^2)^{N/2} / (u^2 - a^2)^{N/2} / (u + i q)
//   * exp(-N (q - i y)^2 / 2 tau - N (u - x)^2 / 2 tau)
// for the source {(-a, N/2), (a, N/2)}. The u-loop is a pair of clockwise circles of radius a/2
// about +-a, so u + i q never vanishes for real q and the term dropped from the source sum
// integrates to zero.
Complex kernel_bh(double a, int n, double tau, double x, double y);

struct SumIdentity {
  Complex lhs;
  Complex rhs;
};

// Geometric double sum over the chain of {(a, N/2), (-a, N/2)} against
// (1 - (-q^2 - a^2)^{N/2} / (u^2 - a^2)^{N/2}) / (u + i q).
SumIdentity source_sum_identity(Complex q, Complex u, double a, int n);

}  // namespace hermdiff
