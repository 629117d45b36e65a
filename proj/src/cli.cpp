#include "hermdiff/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "hermdiff/analytic.hpp"
#include "hermdiff/ensemble.hpp"
#include "hermdiff/kernel.hpp"
#include "hermdiff/parallel.hpp"
#include "hermdiff/random.hpp"
#include "hermdiff/scaling.hpp"
#include "hermdiff/source.hpp"
#include "hermdiff/spectral_flow.hpp"

namespace hermdiff::cli {

using nlohmann::json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::pair<Command, const char*>> kCommandNames = {
    {Command::simulate, "simulate"},         {Command::density, "density"},
    {Command::acp_scan, "acp-scan"},         {Command::aicp_scan, "aicp-scan"},
    {Command::pde_check, "pde-check"},       {Command::green_scan, "green-scan"},
    {Command::caustics, "caustics"},         {Command::airy_profile, "airy-profile"},
    {Command::pearcey_profile, "pearcey-profile"}, {Command::kernel_grid, "kernel-grid"},
    {Command::kernel_verify, "kernel-verify"}, {Command::mc_compare, "mc-compare"},
};

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(what + ": '" + text + "' is not a number");
  }
  if (used != text.size()) fail(what + ": '" + text + "' has trailing characters");
  return v;
}

Complex parse_complex(const json& j) {
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto comma = s.find(',');
    if (comma == std::string::npos) fail("z: expected 're,im', got '" + s + "'");
    return {parse_double(s.substr(0, comma), "z"), parse_double(s.substr(comma + 1), "z")};
  }
  fail("z: expected 're,im' or [re, im]");
}

template <typename T>
T get_number(const json& j, const char* key) {
  if (!j.is_number()) fail(std::string(key) + ": expected a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) fail(std::string(key) + ": expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (j.is_number_unsigned()) return j.get<T>();
      if (j.get<long long>() < 0) fail(std::string(key) + ": expected a nonnegative integer");
    }
  }
  return j.get<T>();
}

std::string get_string(const json& j, const char* key) {
  if (!j.is_string()) fail(std::string(key) + ": expected a string");
  return j.get<std::string>();
}

void add_grid_entry(std::map<std::string, Axis>& grid, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) fail("grid: expected var=min:max:count, got '" + spec + "'");
  grid[spec.substr(0, eq)] = Axis::parse(spec.substr(eq + 1));
}

// Field requirements for one command.
struct FieldRules {
  std::set<std::string> required;
  std::set<std::string> optional;
  std::set<std::string> grid_vars;
  bool needs_source = true;  // source or n
};

FieldRules rules_for(const RunConfig& c) {
  switch (c.command) {
    case Command::simulate: return {{"grid", "trials", "seed"}, {}, {"t"}};
    case Command::density: return {{"tau", "grid"}, {"trials", "seed"}, {"lambda"}};
    case Command::acp_scan: return {{"tau", "grid"}, {}, {"re", "im"}};
    case Command::aicp_scan:
      return c.side ? FieldRules{{"tau", "grid", "side"}, {}, {"re"}} : FieldRules{{"tau", "grid"}, {"side"}, {"re", "im"}};
    case Command::pde_check: return {{"tau", "grid"}, {"evaluator"}, {"re", "im"}};
    case Command::green_scan:
      if (c.mode && *c.mode == "saddle-landscape") return {{"tau", "grid", "z", "mode"}, {"evaluator"}, {"re", "im"}};
      return {{"tau", "grid"}, {"mode"}, {"re", "im"}};
    case Command::caustics: return {{"tau_range"}, {}, {}};
    case Command::airy_profile: return {{"n", "tau", "grid"}, {"kind", "side"}, {"eta"}, false};
    case Command::pearcey_profile: return {{"source", "grid"}, {"n", "kind", "side"}, {"kappa", "eta"}};
    case Command::kernel_grid: return {{"tau", "grid"}, {"mode"}, {"x", "y"}};
    case Command::kernel_verify: return {{"source", "tau", "grid"}, {"n"}, {"x", "y"}};
    case Command::mc_compare: return {{"tau", "grid", "trials", "seed"}, {"evaluator"}, {"re", "im"}};
  }
  return {};
}

std::set<std::string> present_fields(const RunConfig& c) {
  std::set<std::string> s;
  if (c.source) s.insert("source");
  if (c.n) s.insert("n");
  if (c.tau) s.insert("tau");
  if (c.tau_range) s.insert("tau_range");
  if (!c.grid.empty()) s.insert("grid");
  if (c.trials) s.insert("trials");
  if (c.seed) s.insert("seed");
  if (c.mode) s.insert("mode");
  if (c.side) s.insert("side");
  if (c.evaluator) s.insert("evaluator");
  if (c.kind) s.insert("kind");
  if (c.z) s.insert("z");
  return s;
}

void check_choice(const std::optional<std::string>& v, const char* key, std::initializer_list<const char*> allowed) {
  if (!v) return;
  for (const char* a : allowed)
    if (*v == a) return;
  std::string msg = std::string(key) + ": '" + *v + "' is not one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  fail(msg);
}

SourceSpectrum source_of(const RunConfig& c) {
  try {
    if (c.source) {
      SourceSpectrum s = SourceSpectrum::parse(*c.source);
      if (c.n && *c.n != s.dimension())
        fail("n = " + std::to_string(*c.n) + " disagrees with the source dimension " + std::to_string(s.dimension()));
      return s;
    }
    return SourceSpectrum::null(*c.n);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    fail(std::string("source: ") + e.what());
  }
}

Side side_of(const RunConfig& c) { return c.side && *c.side == "lower" ? Side::lower : Side::upper; }

std::vector<Complex> z_grid(const RunConfig& c) {
  std::vector<Complex> zs;
  for (double re : c.grid.at("re").values())
    for (double im : c.grid.at("im").values()) zs.emplace_back(re, im);
  return zs;
}

// Evaluates rows[i] = body(i) for i < count in parallel, keeping the order.
template <typename Body>
std::vector<std::vector<Cell>> rows_of(std::size_t count, Body body) {
  std::vector<std::vector<Cell>> rows(count);
  parallel_for(count, [&](std::size_t i) { rows[i] = body(i); });
  return rows;
}

// re, im of the value when representable, plus log|.| and arg for any magnitude.
void push_log_value(std::vector<Cell>& row, const LogComplex& v) {
  const Complex c = v.to_complex();
  row.insert(row.end(), {c.real(), c.imag(), v.is_zero() ? -std::numeric_limits<double>::infinity() : v.log_abs(),
                         v.is_zero() ? 0.0 : v.arg()});
}

Table simulate(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  const std::vector<double> times = c.grid.at("t").values();
  if (times.front() < 0.0) fail("grid t: times must be nonnegative");
  const std::size_t n = source.dimension();
  Table t{{"path", "t", "index", "lambda"}, {}};
  std::vector<std::vector<std::vector<Cell>>> per_path(*c.trials);
  parallel_for(per_path.size(), [&](std::size_t p) {
    std::mt19937_64 rng = trial_stream(*c.seed, p);
    HermitianState state = HermitianState::from_source(source);
    for (double time : times) {
      state = step_diffusion(state, time - state.time(), rng);
      const Eigen::VectorXd lambda = eigenvalues(state);
      for (std::size_t i = 0; i < n; ++i)
        per_path[p].push_back({static_cast<long>(p), time, static_cast<long>(i), lambda(i)});
    }
  });
  for (auto& rows : per_path)
    for (auto& r : rows) t.rows.push_back(std::move(r));
  return t;
}

Table density_table(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  const std::vector<double> grid = c.grid.at("lambda").values();
  Table t{{"lambda", "rho"}, rows_of(grid.size(), [&](std::size_t i) -> std::vector<Cell> {
            return {grid[i], density(source, *c.tau, grid[i])};
          })};
  if (c.trials) {
    if (!c.seed) fail("density: an empirical histogram needs a seed");
    if (grid.size() < 2) fail("density: an empirical histogram needs at least two lambda points");
    // Bins centred on the grid points.
    const double step = grid[1] - grid[0];
    std::vector<double> edges;
    for (double x : grid) edges.push_back(x - 0.5 * step);
    edges.push_back(grid.back() + 0.5 * step);
    const Histogram h = empirical_density(source, *c.tau, static_cast<int>(*c.trials), edges, *c.seed);
    t.columns.push_back("rho_empirical");
    for (std::size_t i = 0; i < grid.size(); ++i) t.rows[i].push_back(h.heights[i]);
  }
  return t;
}

Table acp_scan(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  const std::vector<Complex> zs = z_grid(c);
  return {{"re_z", "im_z", "re", "im", "log_abs", "arg", "error_estimate"},
          rows_of(zs.size(), [&](std::size_t i) {
            const PolynomialEvaluation v = acp(source, *c.tau, zs[i]);
            std::vector<Cell> row{zs[i].real(), zs[i].imag()};
            push_log_value(row, v.value);
            row.push_back(v.error_estimate);
            return row;
          })};
}

Table aicp_scan(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  std::vector<Complex> zs;
  if (c.side) {
    for (double re : c.grid.at("re").values()) zs.emplace_back(re, 0.0);
  } else {
    zs = z_grid(c);
    for (const Complex& z : zs)
      if (z.imag() == 0.0) fail("aicp-scan: the im grid contains 0; set side=upper|lower for boundary values");
  }
  return {{"re_z", "im_z", "side", "re", "im", "log_abs", "arg", "error_estimate"},
          rows_of(zs.size(), [&](std::size_t i) {
            const Side side = c.side ? side_of(c) : (zs[i].imag() > 0.0 ? Side::upper : Side::lower);
            const PolynomialEvaluation v =
                c.side ? aicp_boundary(source, *c.tau, zs[i], side) : aicp(source, *c.tau, zs[i]);
            std::vector<Cell> row{zs[i].real(), zs[i].imag(), std::string(side == Side::upper ? "upper" : "lower")};
            push_log_value(row, v.value);
            row.push_back(v.error_estimate);
            return row;
          })};
}

Table pde_check(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  const std::vector<Complex> zs = z_grid(c);
  std::vector<Evaluator> evaluators;
  const std::string which = c.evaluator.value_or("both");
  if (which != "aicp") evaluators.push_back(Evaluator::acp);
  if (which != "acp") evaluators.push_back(Evaluator::aicp);
  const double h_z = 2e-3 * std::sqrt(*c.tau / source.dimension());
  const double h_tau = 1e-3 * *c.tau;
  const std::size_t per = evaluators.size();
  return {{"re_z", "im_z", "evaluator", "re_residual", "im_residual", "rel_residual", "wrong_sign"},
          rows_of(zs.size() * per, [&](std::size_t k) -> std::vector<Cell> {
            const Complex z = zs[k / per];
            const Evaluator e = evaluators[k % per];
            const PdeResidual r = pde_residual(e, source, *c.tau, z, h_z, h_tau);
            const PdeResidual w = pde_residual(e, source, *c.tau, z, h_z, h_tau, DiffusionSign::reversed);
            return {z.real(), z.imag(), std::string(e == Evaluator::acp ? "acp" : "aicp"), r.relative.real(),
                    r.relative.imag(), r.abs_relative(), w.abs_relative()};
          })};
}

// Exponent f of the integrand exp(N f(w)) of pi (w = q) or theta (w = u), constant dropped.
Complex landscape(const SourceSpectrum& source, double tau, Complex z, Complex w, bool inverse) {
  const double n = source.dimension();
  const Complex i(0.0, 1.0);
  Complex f{};
  for (const auto& e : source.entries()) {
    const double m = e.multiplicity / n;
    f += inverse ? -m * std::log(w - e.eigenvalue) : m * std::log(-i * w - e.eigenvalue);
  }
  const Complex d = inverse ? w - z : w - i * z;
  return f - d * d / (2.0 * tau);
}

Table green_scan(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  const std::vector<Complex> ws = z_grid(c);
  if (c.mode && *c.mode == "saddle-landscape") {
    const bool inverse = c.evaluator && *c.evaluator == "aicp";
    return {{"re_w", "im_w", "re_f", "im_f"}, rows_of(ws.size(), [&](std::size_t i) -> std::vector<Cell> {
              const Complex f = landscape(source, *c.tau, *c.z, ws[i], inverse);
              return {ws[i].real(), ws[i].imag(), f.real(), f.imag()};
            })};
  }
  return {{"re_z", "im_z", "re_g", "im_g", "root_index", "re_label", "im_label", "residual"},
          rows_of(ws.size(), [&](std::size_t i) -> std::vector<Cell> {
            const GreenEvaluation g = solve_characteristics(source, *c.tau, ws[i]);
            return {ws[i].real(), ws[i].imag(), g.value.real(), g.value.imag(), static_cast<long>(g.root_index),
                    g.label.real(), g.label.imag(), g.residual};
          })};
}

Table caustics_table(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  const std::vector<double> taus = c.tau_range->values();
  if (taus.front() <= 0.0) fail("tau_range: times must be positive");
  std::vector<CausticSet> sets(taus.size());
  parallel_for(taus.size(), [&](std::size_t k) { sets[k] = caustics(source, taus[k]); });
  Table t{{"tau", "index", "position", "label", "merged"}, {}};
  for (std::size_t k = 0; k < taus.size(); ++k)
    for (std::size_t j = 0; j < sets[k].positions.size(); ++j)
      t.rows.push_back({taus[k], static_cast<long>(j), sets[k].positions[j], sets[k].labels[j],
                        static_cast<long>(sets[k].merged)});
  return t;
}

std::string kind_label(const RunConfig& c) {
  if (c.kind && *c.kind == "aicp") return "aicp-" + c.side.value_or("upper");
  return "acp";
}

Table airy_profile(const RunConfig& c) {
  const std::vector<double> etas = c.grid.at("eta").values();
  const bool inverse = c.kind && *c.kind == "aicp";
  const std::vector<EdgeSample> s =
      inverse ? aicp_edge_profile(*c.n, *c.tau, etas, side_of(c)) : acp_edge_profile(*c.n, *c.tau, etas);
  Table t{{"N", "tau", "eta", "kind", "re_rescaled", "im_rescaled", "re_limit", "im_limit", "abs_error"}, {}};
  for (const EdgeSample& e : s)
    t.rows.push_back({static_cast<long>(*c.n), *c.tau, e.eta, kind_label(c), e.rescaled.real(), e.rescaled.imag(),
                      e.limit.real(), e.limit.imag(), e.abs_error()});
  return t;
}

Table pearcey_profile(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  const double a = source.pair_half_gap();
  const std::vector<double> kappas = c.grid.at("kappa").values();
  const std::vector<double> etas = c.grid.at("eta").values();
  const bool inverse = c.kind && *c.kind == "aicp";
  const int n = source.dimension();
  const std::vector<CuspSample> s = inverse ? aicp_cusp_profile(n, a, kappas, etas, side_of(c))
                                            : acp_cusp_profile(n, a, kappas, etas);
  Table t{{"N", "kappa", "eta", "kind", "re_rescaled", "im_rescaled", "re_limit", "im_limit", "abs_error"}, {}};
  for (const CuspSample& e : s)
    t.rows.push_back({static_cast<long>(n), e.kappa, e.eta, kind_label(c), e.rescaled.real(), e.rescaled.imag(),
                      e.limit.real(), e.limit.imag(), e.abs_error()});
  return t;
}

std::vector<std::pair<double, double>> xy_grid(const RunConfig& c) {
  std::vector<std::pair<double, double>> g;
  for (double x : c.grid.at("x").values())
    for (double y : c.grid.at("y").values()) g.emplace_back(x, y);
  return g;
}

Table kernel_grid(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  const bool bh = c.mode && *c.mode == "bh";
  const double a = bh ? source.pair_half_gap() : 0.0;
  const auto g = xy_grid(c);
  return {{"x", "y", "re", "im", "method"}, rows_of(g.size(), [&](std::size_t i) -> std::vector<Cell> {
            const auto [x, y] = g[i];
            const Complex k = bh ? kernel_bh(a, source.dimension(), *c.tau, x, y) : kernel(source, *c.tau, x, y);
            return {x, y, k.real(), k.imag(), std::string(bh ? "bh" : "sum")};
          })};
}

Table kernel_verify(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  const double a = source.pair_half_gap();
  const auto g = xy_grid(c);
  return {{"x", "y", "re_sum", "im_sum", "re_bh", "im_bh", "rel_error"},
          rows_of(g.size(), [&](std::size_t i) -> std::vector<Cell> {
            const auto [x, y] = g[i];
            const Complex k = kernel(source, *c.tau, x, y);
            const Complex b = kernel_bh(a, source.dimension(), *c.tau, x, y);
            return {x, y, k.real(), k.imag(), b.real(), b.imag(), std::abs(k - b) / std::abs(b)};
          })};
}

Table mc_compare(const RunConfig& c) {
  const SourceSpectrum source = source_of(c);
  const std::vector<Complex> zs = z_grid(c);
  const bool inverse = c.evaluator && *c.evaluator == "aicp";
  const int trials = static_cast<int>(*c.trials);
  const std::vector<McEstimate> mc =
      inverse ? mc_aicp(source, *c.tau, zs, trials, *c.seed) : mc_acp(source, *c.tau, zs, trials, *c.seed);
  return {{"re_z", "im_z", "re_mc", "im_mc", "std_error", "re_quad", "im_quad", "z_score"},
          rows_of(zs.size(), [&](std::size_t i) -> std::vector<Cell> {
            const Complex q = inverse ? aicp(source, *c.tau, zs[i]).to_complex() : acp(source, *c.tau, zs[i]).to_complex();
            const double zscore = mc[i].std_error > 0.0 ? std::abs(mc[i].value - q) / mc[i].std_error : nan;
            return {zs[i].real(), zs[i].imag(), mc[i].value.real(), mc[i].value.imag(), mc[i].std_error,
                    q.real(), q.imag(), zscore};
          })};
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long* l = std::get_if<long>(&c)) return std::to_string(*l);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return std::isfinite(*d) ? json(*d) : json(nullptr);
  if (const long* l = std::get_if<long>(&c)) return *l;
  return std::get<std::string>(c);
}

}  // namespace

const char* to_string(Command c) {
  for (const auto& [cmd, name] : kCommandNames)
    if (cmd == c) return name;
  return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [cmd, n] : kCommandNames)
    if (name == n) return cmd;
  return std::nullopt;
}

Axis Axis::parse(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) fail("axis: expected min:max:count, got '" + text + "'");
  Axis axis;
  axis.min = parse_double(text.substr(0, a), "axis min");
  axis.max = parse_double(text.substr(a + 1, b - a - 1), "axis max");
  const double count = parse_double(text.substr(b + 1), "axis count");
  if (count != std::floor(count) || count < 1 || count > 1e7) fail("axis: count must be a positive integer");
  axis.count = static_cast<int>(count);
  if (!std::isfinite(axis.min) || !std::isfinite(axis.max)) fail("axis: bounds must be finite");
  if (axis.min > axis.max) fail("axis: min must not exceed max in '" + text + "'");
  if (axis.count == 1 && axis.min != axis.max) fail("axis: a single point needs min == max");
  return axis;
}

std::vector<double> Axis::values() const {
  std::vector<double> v(count);
  for (int k = 0; k < count; ++k) v[k] = count == 1 ? min : min + (max - min) * k / (count - 1);
  return v;
}

std::string Axis::to_string() const { return format_double(min) + ":" + format_double(max) + ":" + std::to_string(count); }

json RunConfig::to_json() const {
  json j;
  j["command"] = cli::to_string(command);
  if (source) j["source"] = *source;
  if (n) j["n"] = *n;
  if (tau) j["tau"] = *tau;
  if (tau_range) j["tau_range"] = tau_range->to_string();
  if (!grid.empty()) {
    json g = json::object();
    for (const auto& [k, v] : grid) g[k] = v.to_string();
    j["grid"] = g;
  }
  if (trials) j["trials"] = *trials;
  if (seed) j["seed"] = *seed;
  if (out) j["out"] = *out;
  j["format"] = format == Format::csv ? "csv" : "json";
  if (mode) j["mode"] = *mode;
  if (side) j["side"] = *side;
  if (evaluator) j["evaluator"] = *evaluator;
  if (kind) j["kind"] = *kind;
  if (z) j["z"] = json::array({z->real(), z->imag()});
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) fail("config: expected a JSON object");
  RunConfig c;
  bool have_command = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "command") {
      const auto cmd = parse_command(get_string(v, "command"));
      if (!cmd) fail("command: unknown command '" + v.get<std::string>() + "'");
      c.command = *cmd;
      have_command = true;
    } else if (key == "source") {
      c.source = get_string(v, "source");
    } else if (key == "n") {
      c.n = get_number<int>(v, "n");
    } else if (key == "tau") {
      c.tau = get_number<double>(v, "tau");
    } else if (key == "tau_range") {
      c.tau_range = Axis::parse(get_string(v, "tau_range"));
    } else if (key == "grid") {
      if (v.is_object()) {
        for (const auto& [var, spec] : v.items()) c.grid[var] = Axis::parse(get_string(spec, "grid"));
      } else if (v.is_array()) {
        for (const auto& spec : v) add_grid_entry(c.grid, get_string(spec, "grid"));
      } else {
        fail("grid: expected an object or a list of var=min:max:count");
      }
    } else if (key == "trials") {
      c.trials = get_number<long>(v, "trials");
    } else if (key == "seed") {
      c.seed = get_number<std::uint64_t>(v, "seed");
    } else if (key == "out") {
      c.out = get_string(v, "out");
    } else if (key == "format") {
      const std::string f = get_string(v, "format");
      if (f == "csv") c.format = Format::csv;
      else if (f == "json") c.format = Format::json;
      else fail("format: expected csv or json");
    } else if (key == "mode") {
      c.mode = get_string(v, "mode");
    } else if (key == "side") {
      c.side = get_string(v, "side");
    } else if (key == "evaluator") {
      c.evaluator = get_string(v, "evaluator");
    } else if (key == "kind") {
      c.kind = get_string(v, "kind");
    } else if (key == "z") {
      c.z = parse_complex(v);
    } else {
      fail("config: unknown field '" + key + "'");
    }
  }
  if (!have_command) fail("config: command is required");
  return c;
}

void validate(const RunConfig& c) {
  const FieldRules rules = rules_for(c);
  const std::set<std::string> present = present_fields(c);
  const char* cmd = to_string(c.command);
  for (const std::string& f : present) {
    const bool source_field = rules.needs_source && (f == "source" || f == "n");
    if (!rules.required.count(f) && !rules.optional.count(f) && !source_field)
      fail(std::string(cmd) + ": field '" + f + "' is not used by this command");
  }
  for (const std::string& f : rules.required)
    if (!present.count(f)) fail(std::string(cmd) + ": field '" + f + "' is required");
  if (rules.needs_source && !c.source && !c.n) fail(std::string(cmd) + ": give source or n");
  std::set<std::string> vars;
  for (const auto& [k, v] : c.grid) vars.insert(k);
  if (!rules.grid_vars.empty() && vars != rules.grid_vars) {
    std::string want;
    for (const auto& v : rules.grid_vars) want += " " + v;
    fail(std::string(cmd) + ": grid variables must be exactly" + want);
  }
  if (c.n && *c.n < 1) fail("n must be positive");
  if (c.tau && !(*c.tau > 0.0 && std::isfinite(*c.tau))) fail("tau must be positive");
  if (c.trials && *c.trials < (c.command == Command::simulate ? 1 : 2))
    fail(std::string(cmd) + ": trials too small");
  check_choice(c.side, "side", {"upper", "lower"});
  check_choice(c.kind, "kind", {"acp", "aicp"});
  if (c.command == Command::pde_check) check_choice(c.evaluator, "evaluator", {"acp", "aicp", "both"});
  else check_choice(c.evaluator, "evaluator", {"acp", "aicp"});
  if (c.command == Command::green_scan) check_choice(c.mode, "mode", {"green", "saddle-landscape"});
  if (c.command == Command::kernel_grid) check_choice(c.mode, "mode", {"sum", "bh"});
  if (c.command == Command::green_scan && c.evaluator && c.mode.value_or("green") != "saddle-landscape")
    fail("green-scan: evaluator applies to mode saddle-landscape only");
  if ((c.command == Command::airy_profile || c.command == Command::pearcey_profile) && c.side &&
      c.kind.value_or("acp") != "aicp")
    fail(std::string(cmd) + ": side applies to kind aicp only");
  if (c.source || c.n) (void)source_of(c);
}

Table execute(const RunConfig& c) {
  validate(c);
  switch (c.command) {
    case Command::simulate: return simulate(c);
    case Command::density: return density_table(c);
    case Command::acp_scan: return acp_scan(c);
    case Command::aicp_scan: return aicp_scan(c);
    case Command::pde_check: return pde_check(c);
    case Command::green_scan: return green_scan(c);
    case Command::caustics: return caustics_table(c);
    case Command::airy_profile: return airy_profile(c);
    case Command::pearcey_profile: return pearcey_profile(c);
    case Command::kernel_grid: return kernel_grid(c);
    case Command::kernel_verify: return kernel_verify(c);
    case Command::mc_compare: return mc_compare(c);
  }
  fail("unknown command");
}

void write_table(const RunConfig& c, const Table& t, std::ostream& os) {
  const std::string seed = c.seed ? std::to_string(*c.seed) : "none";
  if (c.format == Format::json) {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json o = json::object();
      for (std::size_t k = 0; k < t.columns.size(); ++k) o[t.columns[k]] = cell_json(r[k]);
      rows.push_back(std::move(o));
    }
    const json doc = {{"tool", kToolName},
                      {"version", kToolVersion},
                      {"command", to_string(c.command)},
                      {"config", c.to_json()},
                      {"seed", c.seed ? json(*c.seed) : json(nullptr)},
                      {"columns", t.columns},
                      {"rows", rows}};
    os << doc.dump(1) << '\n';
    return;
  }
  os << "# tool: " << kToolName << ' ' << kToolVersion << '\n';
  os << "# command: " << to_string(c.command) << '\n';
  os << "# config: " << c.to_json().dump() << '\n';
  os << "# seed: " << seed << '\n';
  for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << cell_text(r[k]);
    os << '\n';
  }
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
      dynamic_cast<const UnsupportedSourceError*>(&e))
    return 2;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  return 3;
}

std::string error_record(const std::exception& e) {
  std::string kind = "numerical";
  const int code = exit_code_for(e);
  if (code == 2) kind = "validation";
  if (code == 4) kind = "io";
  json j = {{"error", kind}, {"exit_code", code}, {"message", e.what()}};
  if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) {
    j["best_estimate"] = {ce->best_estimate().real(), ce->best_estimate().imag()};
    j["error_estimate"] = ce->error_estimate();
  }
  if (const auto* be = dynamic_cast<const BranchAmbiguityError*>(&e)) {
    json cands = json::array();
    for (const Complex& x : be->candidates()) cands.push_back({x.real(), x.imag()});
    j["candidates"] = cands;
  }
  return j.dump();
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Table t = execute(config);
    if (!config.out || *config.out == "-") {
      write_table(config, t, out);
      out.flush();
      if (!out) throw IoError("failed writing to standard output");
    } else {
      std::ofstream f(*config.out, std::ios::binary);
      if (!f) throw IoError("cannot open output file '" + *config.out + "'");
      write_table(config, t, f);
      f.close();
      if (!f) throw IoError("failed writing output file '" + *config.out + "'");
    }
    return 0;
  } catch (const std::exception& e) {
    err << error_record(e) << '\n';
    return exit_code_for(e);
  }
}

}  // namespace hermdiff::cli
