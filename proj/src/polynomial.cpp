#include "hermdiff/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include "hermdiff/errors.hpp"

namespace hermdiff {

namespace {

Polynomial linear(std::complex<double> root) {
  Polynomial p(2);
  p << -root, 1.0;
  return p;
}

Polynomial product_except(const std::vector<double>& a, std::size_t skip) {
  Polynomial q = Polynomial::Ones(1);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (i != skip) q = poly_mul(q, linear(a[i]));
  return q;
}

}  // namespace

Polynomial poly_mul(const Polynomial& p, const Polynomial& q) {
  Polynomial r = Polynomial::Zero(p.size() + q.size() - 1);
  for (Eigen::Index i = 0; i < p.size(); ++i)
    for (Eigen::Index j = 0; j < q.size(); ++j) r(i + j) += p(i) * q(j);
  return r;
}

Polynomial poly_add(const Polynomial& p, const Polynomial& q) {
  Polynomial r = Polynomial::Zero(std::max(p.size(), q.size()));
  r.head(p.size()) += p;
  r.head(q.size()) += q;
  return r;
}

std::complex<double> poly_eval(const Polynomial& p, std::complex<double> x) {
  std::complex<double> s{};
  for (Eigen::Index k = p.size() - 1; k >= 0; --k) s = s * x + p(k);
  return s;
}

std::complex<double> poly_derivative_eval(const Polynomial& p, std::complex<double> x) {
  std::complex<double> s{};
  for (Eigen::Index k = p.size() - 1; k >= 1; --k) s = s * x + static_cast<double>(k) * p(k);
  return s;
}

std::vector<std::complex<double>> poly_roots(const Polynomial& p) {
  Eigen::Index deg = p.size() - 1;
  while (deg > 0 && p(deg) == std::complex<double>(0.0, 0.0)) --deg;
  if (deg < 1) throw DomainError("poly_roots: polynomial must have degree >= 1");
  const std::complex<double> lead = p(deg);
  std::vector<std::complex<double>> roots;
  if (deg == 1) {
    roots.push_back(-p(0) / lead);
    return roots;
  }
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) companion(i, deg - 1) = -p(i) / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(companion, false);
  if (eig.info() != Eigen::Success) throw ConvergenceError("companion eigensolver did not converge", {}, 0.0);
  const Polynomial trimmed = p.head(deg + 1);
  for (Eigen::Index i = 0; i < deg; ++i) {
    std::complex<double> x = eig.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      const std::complex<double> d = poly_derivative_eval(trimmed, x);
      if (d == std::complex<double>(0.0, 0.0)) break;
      const std::complex<double> step = poly_eval(trimmed, x) / d;
      const std::complex<double> nx = x - step;
      if (!(std::abs(poly_eval(trimmed, nx)) < std::abs(poly_eval(trimmed, x)))) break;
      x = nx;
    }
    roots.push_back(x);
  }
  return roots;
}

Polynomial characteristic_polynomial(const std::vector<double>& a, const std::vector<double>& w, double tau,
                                     std::complex<double> z) {
  const Polynomial q = product_except(a, a.size());
  Polynomial p = poly_mul(linear(z), q);
  for (std::size_t i = 0; i < a.size(); ++i) p = poly_add(p, (tau * w[i]) * product_except(a, i));
  return p;
}

Polynomial caustic_polynomial(const std::vector<double>& a, const std::vector<double>& w, double tau) {
  const Polynomial q = product_except(a, a.size());
  Polynomial p = poly_mul(q, q);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Polynomial qi = product_except(a, i);
    p = poly_add(p, (-tau * w[i]) * poly_mul(qi, qi));
  }
  return p;
}

}  // namespace hermdiff
