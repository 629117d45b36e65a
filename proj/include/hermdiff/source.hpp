#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hermdiff {

struct SourceEntry {
  double eigenvalue = 0.0;
  int multiplicity = 1;
};

// Spectrum of the initial matrix H0: distinct real eigenvalues with multiplicities.
class SourceSpectrum {
 public:
  // Entries must be strictly increasing with multiplicities >= 1.
  explicit SourceSpectrum(std::vector<SourceEntry> entries);

  // {(0, n)}
  static SourceSpectrum null(int n);
  // {(-a, n/2), (a, n/2)}, n even, a > 0.
  static SourceSpectrum symmetric_pair(double a, int n);
  // "a1:m1,a2:m2,..." in any order.
  static SourceSpectrum parse(const std::string& text);

  const std::vector<SourceEntry>& entries() const { return entries_; }
  std::size_t distinct() const { return entries_.size(); }
  int dimension() const { return dimension_; }

  // Expanded diagonal of H0, ascending.
  Eigen::VectorXd diagonal() const;
  std::vector<double> eigenvalues() const;
  std::vector<int> multiplicities() const;

  bool is_null() const { return entries_.size() == 1 && entries_[0].eigenvalue == 0.0; }
  bool is_symmetric_pair() const;
  // a of a symmetric pair; throws UnsupportedSourceError otherwise.
  double pair_half_gap() const;
  double max_abs() const;

  std::string to_string() const;

 private:
  std::vector<SourceEntry> entries_;
  int dimension_ = 0;
};

}  // namespace hermdiff
