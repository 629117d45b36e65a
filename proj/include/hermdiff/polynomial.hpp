#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace hermdiff {

// Complex polynomial, coefficients in ascending order of degree.
using Polynomial = Eigen::VectorXcd;

Polynomial poly_mul(const Polynomial& p, const Polynomial& q);
Polynomial poly_add(const Polynomial& p, const Polynomial& q);
std::complex<double> poly_eval(const Polynomial& p, std::complex<double> x);
std::complex<double> poly_derivative_eval(const Polynomial& p, std::complex<double> x);

// All roots via the companion matrix, each refined by a few Newton steps.
std::vector<std::complex<double>> poly_roots(const Polynomial& p);

// (xi - z) Q(xi) + tau * sum_i w_i Q(xi)/(xi - a_i), Q = prod_i (xi - a_i).
// Its roots are the solutions of z = xi + tau * sum_i w_i/(xi - a_i).
Polynomial characteristic_polynomial(const std::vector<double>& a, const std::vector<double>& w, double tau,
                                     std::complex<double> z);

// Q^2 - tau * sum_i w_i (Q/(xi - a_i))^2, whose real roots are the caustic labels.
Polynomial caustic_polynomial(const std::vector<double>& a, const std::vector<double>& w, double tau);

}  // namespace hermdiff
