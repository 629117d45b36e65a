// Command-line front end: flags and an optional JSON config file (flags win) are merged
// into one RunConfig and dispatched.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hermdiff/cli.hpp"

using nlohmann::json;
namespace cli = hermdiff::cli;

int main(int argc, char** argv) {
  CLI::App app{"Diffusing Hermitian matrices: averaged (inverse) characteristic polynomials, spectral flow, "
               "scaling limits and kernels"};
  app.set_version_flag("--version", std::string(cli::kToolName) + " " + cli::kToolVersion);

  std::string command, config_path, source, tau_range, out, format, mode, side, evaluator, kind, z, seed;
  int n = 0;
  double tau = 0.0;
  long trials = 0;
  std::vector<std::string> grid;

  auto* o_command = app.add_option("--command", command, "simulate, density, acp-scan, aicp-scan, pde-check, "
                                                         "green-scan, caustics, airy-profile, pearcey-profile, "
                                                         "kernel-grid, kernel-verify, mc-compare");
  app.add_option("--config", config_path, "JSON file with the same field names; flags override it");
  auto* o_source = app.add_option("--source", source, "source spectrum a1:m1,a2:m2,...");
  auto* o_n = app.add_option("--n", n, "matrix size (null source when --source is absent)");
  auto* o_tau = app.add_option("--tau", tau, "diffusion time");
  auto* o_tau_range = app.add_option("--tau-range", tau_range, "min:max:count");
  auto* o_grid = app.add_option("--grid", grid, "var=min:max:count (repeatable)");
  auto* o_trials = app.add_option("--trials", trials, "Monte Carlo trials or simulated paths");
  auto* o_seed = app.add_option("--seed", seed, "64-bit master seed");
  auto* o_out = app.add_option("--out", out, "output path (default stdout)");
  auto* o_format = app.add_option("--format", format, "csv or json");
  auto* o_mode = app.add_option("--mode", mode, "green-scan: green|saddle-landscape; kernel-grid: sum|bh");
  auto* o_side = app.add_option("--side", side, "upper or lower contour for inverse polynomials");
  auto* o_evaluator = app.add_option("--evaluator", evaluator, "acp, aicp (pde-check also both)");
  auto* o_kind = app.add_option("--kind", kind, "profile scans: acp or aicp");
  auto* o_z = app.add_option("--z", z, "complex point re,im (saddle-landscape)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << json{{"error", "validation"}, {"exit_code", 2}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  json merged = json::object();
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      std::cerr << json{{"error", "io"}, {"exit_code", 4}, {"message", "cannot read config file '" + config_path + "'"}}
                       .dump()
                << '\n';
      return 4;
    }
    try {
      merged = json::parse(f);
    } catch (const json::parse_error& e) {
      std::cerr << json{{"error", "validation"}, {"exit_code", 2}, {"message", e.what()}}.dump() << '\n';
      return 2;
    }
    if (!merged.is_object()) {
      std::cerr << json{{"error", "validation"}, {"exit_code", 2}, {"message", "config file must hold an object"}}
                       .dump()
                << '\n';
      return 2;
    }
  }

  try {
    if (o_command->count()) merged["command"] = command;
    if (o_source->count()) merged["source"] = source;
    if (o_n->count()) merged["n"] = n;
    if (o_tau->count()) merged["tau"] = tau;
    if (o_tau_range->count()) merged["tau_range"] = tau_range;
    if (o_grid->count()) {
      json g = merged.contains("grid") && merged["grid"].is_object() ? merged["grid"] : json::object();
      for (const std::string& spec : grid) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0)
          throw cli::ValidationError("grid: expected var=min:max:count, got '" + spec + "'");
        g[spec.substr(0, eq)] = spec.substr(eq + 1);
      }
      merged["grid"] = g;
    }
    if (o_trials->count()) merged["trials"] = trials;
    if (o_seed->count()) {
      std::size_t used = 0;
      unsigned long long s = 0;
      try {
        s = std::stoull(seed, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != seed.size() || seed[0] == '-')
        throw cli::ValidationError("seed: '" + seed + "' is not a 64-bit unsigned integer");
      merged["seed"] = static_cast<std::uint64_t>(s);
    }
    if (o_out->count()) merged["out"] = out;
    if (o_format->count()) merged["format"] = format;
    if (o_mode->count()) merged["mode"] = mode;
    if (o_side->count()) merged["side"] = side;
    if (o_evaluator->count()) merged["evaluator"] = evaluator;
    if (o_kind->count()) merged["kind"] = kind;
    if (o_z->count()) merged["z"] = z;

    const cli::RunConfig config = cli::config_from_json(merged);
    return cli::run(config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << cli::error_record(e) << '\n';
    return cli::exit_code_for(e);
  }
}
