#include "hermdiff/source.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hermdiff/errors.hpp"

namespace hermdiff {

SourceSpectrum::SourceSpectrum(std::vector<SourceEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DomainError("source spectrum needs at least one eigenvalue");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!std::isfinite(e.eigenvalue)) throw DomainError("source eigenvalues must be finite");
    if (e.multiplicity < 1) throw DomainError("source multiplicities must be >= 1");
    if (i > 0 && !(entries_[i - 1].eigenvalue < e.eigenvalue))
      throw DomainError("source eigenvalues must be strictly increasing");
    dimension_ += e.multiplicity;
  }
}

SourceSpectrum SourceSpectrum::null(int n) { return SourceSpectrum({{0.0, n}}); }

SourceSpectrum SourceSpectrum::symmetric_pair(double a, int n) {
  if (!(a > 0.0)) throw DomainError("symmetric pair needs a > 0");
  if (n < 2 || n % 2 != 0) throw PreconditionError("symmetric pair needs an even dimension N >= 2");
  return SourceSpectrum({{-a, n / 2}, {a, n / 2}});
}

SourceSpectrum SourceSpectrum::parse(const std::string& text) {
  std::vector<SourceEntry> entries;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw DomainError("source entry '" + item + "' is not of the form a:m");
    std::size_t used_a = 0;
    std::size_t used_m = 0;
    double a = 0.0;
    long m = 0;
    try {
      a = std::stod(item.substr(0, colon), &used_a);
      m = std::stol(item.substr(colon + 1), &used_m);
    } catch (const std::exception&) {
      throw DomainError("source entry '" + item + "' is not of the form a:m");
    }
    if (used_a != colon || used_m != item.size() - colon - 1)
      throw DomainError("source entry '" + item + "' has trailing characters");
    entries.push_back({a, static_cast<int>(m)});
  }
  std::sort(entries.begin(), entries.end(),
            [](const SourceEntry& x, const SourceEntry& y) { return x.eigenvalue < y.eigenvalue; });
  return SourceSpectrum(std::move(entries));
}

Eigen::VectorXd SourceSpectrum::diagonal() const {
  Eigen::VectorXd d(dimension_);
  Eigen::Index k = 0;
  for (const auto& e : entries_)
    for (int j = 0; j < e.multiplicity; ++j) d(k++) = e.eigenvalue;
  return d;
}

std::vector<double> SourceSpectrum::eigenvalues() const {
  std::vector<double> out;
  for (const auto& e : entries_) out.push_back(e.eigenvalue);
  return out;
}

std::vector<int> SourceSpectrum::multiplicities() const {
  std::vector<int> out;
  for (const auto& e : entries_) out.push_back(e.multiplicity);
  return out;
}

bool SourceSpectrum::is_symmetric_pair() const {
  return entries_.size() == 2 && entries_[0].eigenvalue == -entries_[1].eigenvalue &&
         entries_[0].multiplicity == entries_[1].multiplicity && entries_[1].eigenvalue > 0.0;
}

double SourceSpectrum::pair_half_gap() const {
  if (!is_symmetric_pair()) throw UnsupportedSourceError("operation requires a source {(-a, N/2), (a, N/2)}");
  return entries_[1].eigenvalue;
}

double SourceSpectrum::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e.eigenvalue));
  return m;
}

std::string SourceSpectrum::to_string() const {
  std::string out;
  char buf[64];
  for (const auto& e : entries_) {
    if (!out.empty()) out += ',';
    std::snprintf(buf, sizeof buf, "%.17g:%d", e.eigenvalue, e.multiplicity);
    out += buf;
  }
  return out;
}

}  // namespace hermdiff
