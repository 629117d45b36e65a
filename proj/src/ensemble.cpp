#include "hermdiff/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hermdiff/parallel.hpp"
#include "hermdiff/random.hpp"

namespace hermdiff {

namespace {

// Adds sigma * (GUE increment) to m, drawing diagonal then upper-triangle pairs row by row.
void add_gaussian_hermitian(Eigen::MatrixXcd& m, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::Index n = m.rows();
  const double off = sigma / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) += sigma * g(rng);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double x = g(rng);
      const double y = g(rng);
      m(i, j) += Complex(off * x, off * y);
      m(j, i) = std::conj(m(i, j));
    }
  }
}

std::vector<Eigen::VectorXd> sample_spectra(const SourceSpectrum& source, double tau, int samples,
                                            std::uint64_t seed) {
  std::vector<Eigen::VectorXd> spectra(static_cast<std::size_t>(samples));
  parallel_for(spectra.size(), [&](std::size_t t) {
    auto rng = trial_stream(seed, t);
    spectra[t] = eigenvalues(sample_static(source, tau, rng));
  });
  return spectra;
}

std::vector<McEstimate> reduce(const std::vector<std::vector<Complex>>& per_trial, std::size_t nz) {
  std::vector<McEstimate> out(nz);
  const std::size_t trials = per_trial.size();
  for (std::size_t k = 0; k < nz; ++k) {
    Complex mean{};
    for (std::size_t t = 0; t < trials; ++t) mean += per_trial[t][k];
    mean /= static_cast<double>(trials);
    double ss = 0.0;
    for (std::size_t t = 0; t < trials; ++t) ss += std::norm(per_trial[t][k] - mean);
    const double var = ss / static_cast<double>(trials - 1);
    out[k] = {mean, std::sqrt(var / static_cast<double>(trials)), static_cast<int>(trials)};
  }
  return out;
}

void check_tau(double tau) {
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
}

}  // namespace

HermitianState step_diffusion(const HermitianState& state, double dt, std::mt19937_64& rng) {
  if (!(dt >= 0.0)) throw DomainError("step_diffusion: dt must be nonnegative");
  if (dt == 0.0) return state;
  Eigen::MatrixXcd m = state.entries();
  add_gaussian_hermitian(m, std::sqrt(dt / state.dimension()), rng);
  return HermitianState(std::move(m), state.time() + dt);
}

HermitianState sample_static(const SourceSpectrum& source, double tau, std::mt19937_64& rng) {
  check_tau(tau);
  Eigen::MatrixXcd m = HermitianState::from_source(source).entries();
  add_gaussian_hermitian(m, std::sqrt(tau / source.dimension()), rng);
  return HermitianState(std::move(m), tau);
}

Eigen::VectorXd eigenvalues(const HermitianState& state) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(state.entries(), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver did not converge", {}, 0.0);
  return eig.eigenvalues();
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXcd& matrix) {
  if (!HermitianState::is_exactly_hermitian(matrix)) throw DomainError("eigenvalues: matrix is not Hermitian");
  return eigenvalues(HermitianState(matrix, 0.0));
}

EigenPairs eigen_decomposition(const HermitianState& state) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(state.entries());
  if (eig.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver did not converge", {}, 0.0);
  return {eig.eigenvalues(), eig.eigenvectors()};
}

LogComplex characteristic_product(Complex z, const Eigen::VectorXd& lambda) {
  Complex p(1.0, 0.0);
  int exponent = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    p *= z - lambda(i);
    const double mag = std::max(std::abs(p.real()), std::abs(p.imag()));
    if (mag == 0.0) return {};
    if (mag > 1e100 || mag < 1e-100) {
      int e = 0;
      std::frexp(mag, &e);
      p = Complex(std::ldexp(p.real(), -e), std::ldexp(p.imag(), -e));
      exponent += e;
    }
  }
  return LogComplex::from_parts(p, exponent * std::numbers::ln2);
}

std::vector<McEstimate> mc_acp(const SourceSpectrum& source, double tau, const std::vector<Complex>& z_list,
                               int trials, std::uint64_t seed) {
  check_tau(tau);
  if (trials < 2) throw PreconditionError("mc_acp needs at least 2 trials");
  const auto spectra = sample_spectra(source, tau, trials, seed);
  std::vector<std::vector<Complex>> values(spectra.size(), std::vector<Complex>(z_list.size()));
  parallel_for(spectra.size(), [&](std::size_t t) {
    for (std::size_t k = 0; k < z_list.size(); ++k)
      values[t][k] = characteristic_product(z_list[k], spectra[t]).to_complex();
  });
  return reduce(values, z_list.size());
}

std::vector<McEstimate> mc_aicp(const SourceSpectrum& source, double tau, const std::vector<Complex>& z_list,
                                int trials, std::uint64_t seed, std::optional<double> im_floor) {
  check_tau(tau);
  if (trials < 2) throw PreconditionError("mc_aicp needs at least 2 trials");
  const double floor = im_floor.value_or(0.1 * std::sqrt(tau));
  if (!(floor > 0.0)) throw PreconditionError("mc_aicp: im-floor must be positive");
  for (const Complex& z : z_list) {
    if (std::abs(z.imag()) < floor) {
      std::ostringstream os;
      os << "mc_aicp: |Im z| = " << std::abs(z.imag()) << " is below im-floor " << floor << " at z = " << z;
      throw PreconditionError(os.str());
    }
  }
  const auto spectra = sample_spectra(source, tau, trials, seed);
  std::vector<std::vector<Complex>> values(spectra.size(), std::vector<Complex>(z_list.size()));
  parallel_for(spectra.size(), [&](std::size_t t) {
    for (std::size_t k = 0; k < z_list.size(); ++k)
      values[t][k] = (LogComplex(Complex(1.0, 0.0)) / characteristic_product(z_list[k], spectra[t])).to_complex();
  });
  return reduce(values, z_list.size());
}

Histogram empirical_density(const SourceSpectrum& source, double tau, int samples, int bins, std::uint64_t seed) {
  check_tau(tau);
  if (samples < 1) throw PreconditionError("empirical_density needs samples >= 1");
  if (bins < 2) throw PreconditionError("empirical_density needs bins >= 2");
  const auto spectra = sample_spectra(source, tau, samples, seed);
  double lo = spectra[0](0);
  double hi = lo;
  for (const auto& s : spectra) {
    lo = std::min(lo, s.minCoeff());
    hi = std::max(hi, s.maxCoeff());
  }
  if (hi - lo <= 0.0) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
  h.edges.back() = hi;
  h.heights.assign(static_cast<std::size_t>(bins), 0.0);
  std::vector<long> counts(static_cast<std::size_t>(bins), 0);
  long total = 0;
  for (const auto& s : spectra) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      auto b = static_cast<long>((s(i) - lo) / (hi - lo) * bins);
      b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
      ++counts[b];
      ++total;
    }
  }
  for (int b = 0; b < bins; ++b)
    h.heights[b] = static_cast<double>(counts[b]) / (static_cast<double>(total) * (h.edges[b + 1] - h.edges[b]));
  return h;
}

Histogram empirical_density(const SourceSpectrum& source, double tau, int samples, const std::vector<double>& edges,
                            std::uint64_t seed) {
  check_tau(tau);
  if (samples < 1) throw PreconditionError("empirical_density needs samples >= 1");
  if (edges.size() < 3) throw PreconditionError("empirical_density needs at least 2 bins");
  for (std::size_t b = 1; b < edges.size(); ++b)
    if (!(edges[b] > edges[b - 1])) throw PreconditionError("histogram edges must be strictly increasing");
  const auto spectra = sample_spectra(source, tau, samples, seed);
  Histogram h;
  h.edges = edges;
  h.heights.assign(edges.size() - 1, 0.0);
  long total = 0;
  std::vector<long> counts(edges.size() - 1, 0);
  for (const auto& s : spectra) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      ++total;
      const auto it = std::upper_bound(edges.begin(), edges.end(), s(i));
      if (it == edges.begin()) continue;
      std::size_t b = static_cast<std::size_t>(it - edges.begin()) - 1;
      if (b == counts.size()) {
        if (s(i) == edges.back()) b = counts.size() - 1;
        else continue;
      }
      ++counts[b];
    }
  }
  for (std::size_t b = 0; b < counts.size(); ++b)
    h.heights[b] = static_cast<double>(counts[b]) / (static_cast<double>(total) * (edges[b + 1] - edges[b]));
  return h;
}

}  // namespace hermdiff
