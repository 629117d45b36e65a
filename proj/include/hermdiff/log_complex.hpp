#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace hermdiff {

// Complex number stored as mantissa * exp(log_scale), with |mantissa| in [1, e)
// or mantissa == 0. Spans magnitudes far outside the double range.
class LogComplex {
 public:
  LogComplex() = default;

  explicit LogComplex(std::complex<double> v) { set(v, 0.0); }

  // exp(log_value), for any complex log_value with finite imaginary part.
  static LogComplex from_log(std::complex<double> log_value) {
    LogComplex r;
    if (std::isinf(log_value.real()) && log_value.real() < 0) return r;
    const double k = std::floor(log_value.real());
    r.mantissa_ = std::polar(std::exp(log_value.real() - k), log_value.imag());
    r.log_scale_ = k;
    return r;
  }

  static LogComplex from_parts(std::complex<double> mantissa, double log_scale) {
    LogComplex r;
    r.set(mantissa, log_scale);
    return r;
  }

  std::complex<double> mantissa() const { return mantissa_; }
  double log_scale() const { return log_scale_; }
  bool is_zero() const { return mantissa_ == std::complex<double>(0.0, 0.0); }

  // May overflow to inf or underflow to 0.
  std::complex<double> to_complex() const {
    if (is_zero()) return {};
    return mantissa_ * std::exp(log_scale_);
  }

  double log_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return log_scale_ + std::log(std::abs(mantissa_));
  }

  double arg() const { return std::arg(mantissa_); }

  // Principal-argument logarithm.
  std::complex<double> log() const { return {log_abs(), arg()}; }

  friend LogComplex operator*(const LogComplex& a, const LogComplex& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return from_parts(a.mantissa_ * b.mantissa_, a.log_scale_ + b.log_scale_);
  }

  friend LogComplex operator/(const LogComplex& a, const LogComplex& b) {
    if (a.is_zero()) return {};
    return from_parts(a.mantissa_ / b.mantissa_, a.log_scale_ - b.log_scale_);
  }

  friend LogComplex operator*(const LogComplex& a, std::complex<double> b) {
    return a * LogComplex(b);
  }

  friend LogComplex operator+(const LogComplex& a, const LogComplex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double s = std::max(a.log_scale_, b.log_scale_);
    return from_parts(a.mantissa_ * std::exp(a.log_scale_ - s) + b.mantissa_ * std::exp(b.log_scale_ - s),
                      s);
  }

  friend LogComplex operator-(const LogComplex& a, const LogComplex& b) {
    return a + LogComplex::from_parts(-b.mantissa_, b.log_scale_);
  }

  LogComplex conj() const { return from_parts(std::conj(mantissa_), log_scale_); }

  // a/b as an ordinary complex number; for ratios of comparable magnitude.
  friend std::complex<double> ratio(const LogComplex& a, const LogComplex& b) {
    return (a / b).to_complex();
  }

 private:
  void set(std::complex<double> m, double scale) {
    const double mag = std::abs(m);
    if (mag == 0.0 || !std::isfinite(mag)) {
      mantissa_ = (mag == 0.0) ? std::complex<double>{} : m;
      log_scale_ = 0.0;
      return;
    }
    double k = std::floor(std::log(mag) + scale);
    std::complex<double> r = m * std::exp(scale - k);
    const double rm = std::abs(r);
    if (rm < 1.0) {
      r *= std::numbers::e;
      k -= 1.0;
    } else if (rm >= std::numbers::e) {
      r /= std::numbers::e;
      k += 1.0;
    }
    mantissa_ = r;
    log_scale_ = k;
  }

  std::complex<double> mantissa_{};
  double log_scale_ = 0.0;
};

}  // namespace hermdiff
