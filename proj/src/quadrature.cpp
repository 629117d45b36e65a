#include "hermdiff/quadrature.hpp"

#include <algorithm>
#include <sstream>

namespace hermdiff {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Complex checked(const ComplexFn& f, Complex w) {
  const Complex v = f(w);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream os;
    os << "non-finite integrand value at node " << w;
    throw DomainError(os.str());
  }
  return v;
}

bool converged(double diff, double value_abs, double l1, const QuadratureOptions& opts) {
  return diff <= opts.rel_tol * value_abs || diff <= 64.0 * kEps * l1;
}

QuadratureResult line_trapezoid(const ComplexFn& f, const ShiftedLine& c, const QuadratureOptions& opts) {
  const double a = c.center - c.half_width;
  const double width = 2.0 * c.half_width;
  auto at = [&](double r) { return checked(f, Complex(r, c.offset)); };

  int n = std::max(2, c.nodes - 1);  // intervals
  double h = width / n;
  const Complex f_lo = at(a);
  const Complex f_hi = at(a + width);
  Complex interior{};
  double max_abs = std::max(std::abs(f_lo), std::abs(f_hi));
  double l1 = 0.0;
  for (int k = 1; k < n; ++k) {
    const Complex v = at(a + k * h);
    interior += v;
    max_abs = std::max(max_abs, std::abs(v));
    l1 += std::abs(v);
  }
  const double edge = std::max(std::abs(f_lo), std::abs(f_hi));
  if (edge > 1e-15 * max_abs && max_abs > 0.0) {
    std::ostringstream os;
    os << "integrand has not decayed at |Re w - center| = " << c.half_width << " (edge/max = " << edge / max_abs
       << "); widen the half-width";
    throw TruncationError(os.str());
  }
  Complex t = h * (interior + 0.5 * (f_lo + f_hi));
  while (true) {
    if (2 * n + 1 > opts.max_nodes) {
      throw ConvergenceError("shifted-line trapezoid hit the node cap", t, std::abs(t));
    }
    Complex added{};
    for (int k = 0; k < n; ++k) {
      const Complex v = at(a + (k + 0.5) * h);
      added += v;
      l1 += std::abs(v);
    }
    interior += added;
    n *= 2;
    h *= 0.5;
    const Complex t2 = h * (interior + 0.5 * (f_lo + f_hi));
    const double diff = std::abs(t2 - t);
    t = t2;
    if (converged(diff, std::abs(t), h * l1, opts)) return {t, diff, n + 1};
  }
}

QuadratureResult loop_trapezoid(const ComplexFn& f, const ClosedLoop& c, const QuadratureOptions& opts) {
  const double sign = c.orientation == Orientation::counterclockwise ? 1.0 : -1.0;
  auto term = [&](double theta) {
    const Complex e = std::polar(1.0, theta);
    return checked(f, c.center + c.radius * e) * Complex(0.0, c.radius) * e;
  };
  int n = std::max(2, c.nodes);
  Complex sum{};
  double l1 = 0.0;
  for (int k = 0; k < n; ++k) {
    const Complex v = term(2.0 * std::numbers::pi * k / n);
    sum += v;
    l1 += std::abs(v);
  }
  Complex t = sign * (2.0 * std::numbers::pi / n) * sum;
  while (true) {
    if (2 * n > opts.max_nodes) throw ConvergenceError("closed-loop trapezoid hit the node cap", t, std::abs(t));
    for (int k = 0; k < n; ++k) {
      const Complex v = term(2.0 * std::numbers::pi * (k + 0.5) / n);
      sum += v;
      l1 += std::abs(v);
    }
    n *= 2;
    const Complex t2 = sign * (2.0 * std::numbers::pi / n) * sum;
    const double diff = std::abs(t2 - t);
    t = t2;
    if (converged(diff, std::abs(t), 2.0 * std::numbers::pi / n * l1, opts)) return {t, diff, n};
  }
}

// Composite 16-point Gauss-Legendre along both rays, doubling the panel count.
QuadratureResult ray_pair(const ComplexFn& f, const RayPair& c, const QuadratureOptions& opts) {
  static const GaussRule<double> gl = gauss_legendre_rule<double>(16);
  const Complex d_in = std::polar(1.0, c.angle_in);
  const Complex d_out = std::polar(1.0, c.angle_out);

  const double max_mid = std::max(std::abs(checked(f, c.origin)), 0.0);
  const double end_in = std::abs(checked(f, c.origin + c.length * d_in));
  const double end_out = std::abs(checked(f, c.origin + c.length * d_out));

  double peak = max_mid;
  auto panels_sum = [&](int panels, double& l1) {
    const double w = c.length / panels;
    Complex s{};
    l1 = 0.0;
    for (int p = 0; p < panels; ++p) {
      for (int k = 0; k < gl.nodes.size(); ++k) {
        const double r = w * (p + 0.5 * (gl.nodes(k) + 1.0));
        const double wt = 0.5 * w * gl.weights(k);
        const Complex vo = checked(f, c.origin + r * d_out);
        const Complex vi = checked(f, c.origin + r * d_in);
        peak = std::max({peak, std::abs(vo), std::abs(vi)});
        s += wt * (vo * d_out - vi * d_in);
        l1 += wt * (std::abs(vo) + std::abs(vi));
      }
    }
    return s;
  };

  int panels = std::max(1, c.nodes / 16);
  double l1 = 0.0;
  Complex t = panels_sum(panels, l1);
  const double edge = std::max(end_in, end_out);
  if (edge > 1e-15 * peak && peak > 0.0) {
    std::ostringstream os;
    os << "integrand has not decayed at ray length " << c.length << " (edge/max = " << edge / peak << ")";
    throw TruncationError(os.str());
  }
  while (true) {
    if (2 * panels * 16 * 2 > opts.max_nodes) {
      throw ConvergenceError("ray-pair quadrature hit the node cap", t, std::abs(t));
    }
    panels *= 2;
    const Complex t2 = panels_sum(panels, l1);
    const double diff = std::abs(t2 - t);
    t = t2;
    if (converged(diff, std::abs(t), l1, opts)) return {t, diff, panels * 32};
  }
}

QuadratureResult hermite(const ComplexFn& f, const HermiteRule& c, int nodes) {
  const GaussRule<double> rule = gauss_hermite_rule<double>(nodes);
  Complex s{};
  for (int k = 0; k < nodes; ++k) s += rule.weights(k) * checked(f, c.center + c.scale * rule.nodes(k));
  return {c.scale * s, 0.0, nodes};
}

QuadratureResult hermite_adaptive(const ComplexFn& f, const HermiteRule& c, const QuadratureOptions& opts) {
  int n = std::max(2, c.nodes);
  QuadratureResult prev = hermite(f, c, n);
  const int cap = std::min(opts.max_nodes, 1024);
  while (2 * n <= cap) {
    n *= 2;
    QuadratureResult next = hermite(f, c, n);
    const double diff = std::abs(next.value - prev.value);
    next.error_estimate = diff;
    if (diff <= opts.rel_tol * std::abs(next.value) || diff <= 64.0 * kEps * std::abs(next.value)) return next;
    prev = next;
  }
  throw ConvergenceError("Gauss-Hermite refinement hit the node cap", prev.value, prev.error_estimate);
}

}  // namespace

void validate(const ContourSpec& contour) {
  std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if (c.nodes < 2) throw ConfigurationError("contour needs at least 2 nodes");
        if constexpr (std::is_same_v<T, ShiftedLine>) {
          if (!(c.half_width > 0.0)) throw ConfigurationError("shifted-line half-width must be positive");
        } else if constexpr (std::is_same_v<T, HermiteRule>) {
          if (!(c.scale > 0.0)) throw ConfigurationError("hermite-rule scale must be positive");
        } else if constexpr (std::is_same_v<T, ClosedLoop>) {
          if (!(c.radius > 0.0)) throw ConfigurationError("closed-loop radius must be positive");
        } else {
          if (!(c.length > 0.0)) throw ConfigurationError("ray-pair length must be positive");
        }
      },
      contour);
}

QuadratureResult integrate_gaussian_line(const ComplexFn& f, Complex center, double variance, int degree_hint,
                                         const QuadratureOptions& opts) {
  if (!(variance > 0.0)) throw DomainError("integrate_gaussian_line: variance must be positive");
  const HermiteRule rule{center, std::sqrt(variance), degree_hint >= 0 ? exact_rule_nodes(degree_hint) : 8};
  if (degree_hint >= 0) return hermite(f, rule, rule.nodes);
  return hermite_adaptive(f, rule, opts);
}

QuadratureResult integrate_contour(const ComplexFn& f, const ContourSpec& contour, const QuadratureOptions& opts) {
  validate(contour);
  return std::visit(
      [&](const auto& c) -> QuadratureResult {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ShiftedLine>) {
          return line_trapezoid(f, c, opts);
        } else if constexpr (std::is_same_v<T, HermiteRule>) {
          return hermite_adaptive(f, c, opts);
        } else if constexpr (std::is_same_v<T, ClosedLoop>) {
          return loop_trapezoid(f, c, opts);
        } else {
          return ray_pair(f, c, opts);
        }
      },
      contour);
}

LineProfile profile_log_line(const LogLine& line, double cut) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> anchors;
  for (double a : line.anchors)
    if (std::isfinite(a)) anchors.push_back(a);
  if (anchors.empty()) anchors.push_back(0.0);
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

  const double h = line.resolution;
  if (!(h > 0.0)) throw ConfigurationError("line resolution must be positive");

  LineProfile out;
  std::vector<std::pair<double, double>> samples;
  auto eval = [&](double r) {
    double v = line.log_integrand(r).real();
    if (std::isnan(v)) {
      std::ostringstream os;
      os << "non-finite log-integrand at line coordinate " << r;
      throw DomainError(os.str());
    }
    samples.emplace_back(r, v);
    out.max_log = std::max(out.max_log, v);
    ++out.evaluations;
  };
  for (double a : anchors) eval(a);
  if (out.max_log == -inf) {
    for (double a : anchors) {
      eval(a - h);
      eval(a + h);
    }
    if (out.max_log == -inf) throw DomainError("integrand vanishes at every anchor");
  }

  // March from start towards stop (stop may be infinite), skipping stretches where the
  // bound is already below the threshold.
  auto march = [&](double start, double dir, double stop) {
    double r = start;
    long steps = 0;
    while (true) {
      const double thr = out.max_log - cut;
      const double rest = dir < 0 ? line.upper_bound(stop, r) : line.upper_bound(r, stop);
      if (rest < thr) return;
      const double next = r + dir * h;
      if ((dir < 0 && next <= stop) || (dir > 0 && next >= stop)) return;
      auto seg_bound = [&](double d) {
        return dir < 0 ? line.upper_bound(r - d, r) : line.upper_bound(r, r + d);
      };
      if (seg_bound(h) < thr) {
        double d = h;
        while (seg_bound(2.0 * d) < thr && std::isfinite(r + dir * 2.0 * d) &&
               !((dir < 0 && r - 2.0 * d <= stop) || (dir > 0 && r + 2.0 * d >= stop)))
          d *= 2.0;
        r += dir * d;
      } else {
        r = next;
        eval(r);
      }
      if (++steps > 4'000'000) throw TruncationError("line exploration did not terminate; bound too weak");
    }
  };

  march(anchors.front(), -1.0, -inf);
  for (std::size_t k = 0; k + 1 < anchors.size(); ++k) march(anchors[k], 1.0, anchors[k + 1]);
  march(anchors.back(), 1.0, inf);

  const double thr = out.max_log - cut;
  out.lo = inf;
  out.hi = -inf;
  for (const auto& [r, v] : samples) {
    if (v >= thr) {
      out.lo = std::min(out.lo, r);
      out.hi = std::max(out.hi, r);
    }
  }
  out.lo -= h;
  out.hi += h;
  return out;
}

LogQuadratureResult integrate_log_line(const LogLine& line, const LineProfile& profile, const QuadratureOptions& opts) {
  const double a = profile.lo;
  const double width = profile.hi - profile.lo;
  const double m = profile.max_log;
  auto at = [&](double r) {
    const Complex l = line.log_integrand(r);
    if (l.real() == -std::numeric_limits<double>::infinity()) return Complex{};
    const Complex v = std::exp(l - m);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "non-finite integrand at line coordinate " << r;
      throw DomainError(os.str());
    }
    return v;
  };

  int n = std::max(16, static_cast<int>(std::ceil(width / line.resolution)));
  double h = width / n;
  const Complex ends = 0.5 * (at(a) + at(a + width));
  Complex interior{};
  double l1 = 0.0;
  for (int k = 1; k < n; ++k) {
    const Complex v = at(a + k * h);
    interior += v;
    l1 += std::abs(v);
  }
  Complex t = h * (interior + ends);
  while (true) {
    if (2 * n + 1 > opts.max_nodes) {
      throw ConvergenceError("log-scaled line trapezoid hit the node cap (value relative to exp(max_log))", t,
                             std::abs(t));
    }
    for (int k = 0; k < n; ++k) {
      const Complex v = at(a + (k + 0.5) * h);
      interior += v;
      l1 += std::abs(v);
    }
    n *= 2;
    h *= 0.5;
    const Complex t2 = h * (interior + ends);
    const double diff = std::abs(t2 - t);
    t = t2;
    if (converged(diff, std::abs(t), h * l1, opts)) {
      LogQuadratureResult res;
      res.value = LogComplex::from_parts(t, m);
      res.error_estimate = std::abs(t) > 0.0 ? diff / std::abs(t) : diff;
      res.nodes_used = n + 1;
      return res;
    }
  }
}

Complex pairwise_sum(const Complex* values, std::size_t count) {
  if (count == 0) return {};
  if (count <= 8) {
    Complex s{};
    for (std::size_t k = 0; k < count; ++k) s += values[k];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

}  // namespace hermdiff
