#pragma once

// Matrix diffusion H(tau) = H0 + sum of Hermitian Gaussian increments, its static
// equivalent H0 + sqrt(tau) X, and Monte Carlo averages over the ensemble.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hermdiff/errors.hpp"
#include "hermdiff/log_complex.hpp"
#include "hermdiff/source.hpp"

namespace hermdiff {

template <typename Real>
class BasicHermitianState {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  // Throws DomainError unless entries is square, exactly Hermitian with a real diagonal,
  // and time >= 0.
  BasicHermitianState(Matrix entries, Real time) : entries_(std::move(entries)), time_(time) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
      throw DomainError("Hermitian state must be a non-empty square matrix");
    if (!(time_ >= 0)) throw DomainError("diffusion time must be nonnegative");
    if (!is_exactly_hermitian(entries_)) throw DomainError("matrix is not exactly Hermitian");
  }

  // H0 = diag(source) at time 0.
  static BasicHermitianState from_source(const SourceSpectrum& source) {
    const Eigen::VectorXd d = source.diagonal();
    Matrix m = Matrix::Zero(d.size(), d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) m(i, i) = Scalar(static_cast<Real>(d(i)), 0);
    return BasicHermitianState(std::move(m), 0);
  }

  static bool is_exactly_hermitian(const Matrix& m) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(j, j).imag() != 0) return false;
      for (Eigen::Index i = j + 1; i < m.rows(); ++i)
        if (m(i, j) != std::conj(m(j, i))) return false;
    }
    return true;
  }

  int dimension() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  Real time() const { return time_; }

 private:
  Matrix entries_;
  Real time_;
};

using HermitianState = BasicHermitianState<double>;

// Adds independent N(0, dt/N) increments to x_ii, x_ij, y_ij (i < j), with
// H_ij += (x_ij + i y_ij)/sqrt(2). dt = 0 returns the input unchanged.
HermitianState step_diffusion(const HermitianState& state, double dt, std::mt19937_64& rng);

// H0 + sqrt(tau) X with X distributed as exp(-(N/2) Tr X^2).
HermitianState sample_static(const SourceSpectrum& source, double tau, std::mt19937_64& rng);

// Ascending eigenvalues. The matrix overload throws DomainError for non-Hermitian input.
Eigen::VectorXd eigenvalues(const HermitianState& state);
Eigen::VectorXd eigenvalues(const Eigen::MatrixXcd& matrix);

struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;  // columns
};
EigenPairs eigen_decomposition(const HermitianState& state);

// prod_i (z - lambda_i) without overflow.
LogComplex characteristic_product(Complex z, const Eigen::VectorXd& lambda);

struct McEstimate {
  Complex value{};
  double std_error = 0.0;
  int trials = 0;
};

std::vector<McEstimate> mc_acp(const SourceSpectrum& source, double tau, const std::vector<Complex>& z_list,
                               int trials, std::uint64_t seed);

// Default im_floor is 0.1 sqrt(tau).
std::vector<McEstimate> mc_aicp(const SourceSpectrum& source, double tau, const std::vector<Complex>& z_list,
                                int trials, std::uint64_t seed, std::optional<double> im_floor = std::nullopt);

struct Histogram {
  std::vector<double> edges;    // bins + 1
  std::vector<double> heights;  // unit total mass
};

// Pooled eigenvalues of `samples` static draws, binned over their range.
Histogram empirical_density(const SourceSpectrum& source, double tau, int samples, int bins, std::uint64_t seed);

// Pooled eigenvalues binned with caller-supplied edges; mass outside the edges is lost.
Histogram empirical_density(const SourceSpectrum& source, double tau, int samples, const std::vector<double>& edges,
                            std::uint64_t seed);

}  // namespace hermdiff
