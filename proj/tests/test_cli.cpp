#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "hermdiff/cli.hpp"

using namespace hermdiff;
using namespace hermdiff::cli;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_json(const json& j) {
  std::ostringstream out, err;
  const int code = run(config_from_json(j), out, err);
  return {code, out.str(), err.str()};
}

// Data lines of a CSV output, header block and column line removed.
std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  bool columns_seen = false;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) continue;
    if (!columns_seen) {
      columns_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double num(const std::string& s) { return std::stod(s); }

}  // namespace

TEST_CASE("axis parsing") {
  const Axis a = Axis::parse("-1:1:5");
  CHECK(a.values() == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK(Axis::parse("2:2:1").values() == std::vector<double>{2.0});
  CHECK_THROWS_AS(Axis::parse("1:0:3"), ValidationError);
  CHECK_THROWS_AS(Axis::parse("0:1:0"), ValidationError);
  CHECK_THROWS_AS(Axis::parse("0:1"), ValidationError);
  CHECK(parse_command("kernel-verify") == Command::kernel_verify);
  CHECK_FALSE(parse_command("bogus").has_value());
}

TEST_CASE("pde-check: residuals on a 9-point grid") {
  const Outcome o = run_json({{"command", "pde-check"},
                              {"n", 4},
                              {"tau", 1.0},
                              {"evaluator", "acp"},
                              {"grid", {{"re", "-0.5:0.5:3"}, {"im", "0.3:0.9:3"}}}});
  REQUIRE(o.code == 0);
  const auto rows = data_rows(o.out);
  REQUIRE(rows.size() == 9);
  for (const auto& r : rows) {
    CHECK(num(r[5]) < 1e-5);
    CHECK(num(r[6]) > 1e-2);
  }
}

TEST_CASE("caustics: merged flag switches at tau = a^2") {
  const Outcome o = run_json({{"command", "caustics"}, {"source", "-1:1,1:1"}, {"tau_range", "0.1:2:20"}});
  REQUIRE(o.code == 0);
  double first_merged = -1.0, last_unmerged = -1.0;
  for (const auto& r : data_rows(o.out)) {
    const double tau = num(r[0]);
    if (r[4] == "1" && first_merged < 0.0) first_merged = tau;
    if (r[4] == "0") last_unmerged = tau;
  }
  const double step = 1.9 / 19.0;
  CHECK(last_unmerged < first_merged);
  CHECK(std::abs(first_merged - 1.0) <= step + 1e-12);
  CHECK(std::abs(last_unmerged - 1.0) <= step + 1e-12);
}

TEST_CASE("mc-compare: z-scores") {
  const Outcome o = run_json({{"command", "mc-compare"},
                              {"n", 4},
                              {"tau", 1.0},
                              {"trials", 100000},
                              {"seed", 2024},
                              {"grid", {{"re", "-1:1:3"}, {"im", "0.5:0.5:1"}}}});
  REQUIRE(o.code == 0);
  const auto rows = data_rows(o.out);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) CHECK(std::abs(num(r[7])) < 4.0);
}

TEST_CASE("output is self-describing and reproducible") {
  const json cfg = {{"command", "density"},
                    {"n", 50},
                    {"tau", 1.0},
                    {"trials", 4},
                    {"seed", 99},
                    {"grid", {{"lambda", "-2.5:2.5:11"}}}};
  const Outcome a = run_json(cfg);
  const Outcome b = run_json(cfg);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.starts_with("# tool: hermdiff 1.0.0\n# command: density\n# config: "));
  CHECK(a.out.find("\n# seed: 99\n") != std::string::npos);
  const auto rows = data_rows(a.out);
  REQUIRE(rows.size() == 11);
  CHECK(std::abs(num(rows[5][1]) - 1.0 / M_PI) < 1e-9);
  CHECK(num(rows[0][1]) == 0.0);

  // The echoed config reproduces the run.
  const std::string line = a.out.substr(a.out.find("# config: ") + 10);
  const json echoed = json::parse(line.substr(0, line.find('\n')));
  CHECK(run_json(echoed).out == a.out);
}

TEST_CASE("json format") {
  const Outcome o = run_json({{"command", "acp-scan"},
                              {"n", 3},
                              {"tau", 1.0},
                              {"format", "json"},
                              {"grid", {{"re", "1:1:1"}, {"im", "0:0:1"}}}});
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  CHECK(j["tool"] == "hermdiff");
  CHECK(j["command"] == "acp-scan");
  CHECK(j["columns"][2] == "re");
  CHECK(std::abs(j["rows"][0]["re"].get<double>()) < 1e-13);
}

TEST_CASE("exit codes and error records") {
  // A field the command does not consume.
  Outcome o = run_json({{"command", "acp-scan"},
                        {"n", 4},
                        {"tau", 1.0},
                        {"trials", 5},
                        {"grid", {{"re", "0:1:2"}, {"im", "0:0:1"}}}});
  CHECK(o.code == 2);
  CHECK(json::parse(o.err)["error"] == "validation");
  CHECK_THROWS_AS(config_from_json({{"command", "acp-scan"}, {"colour", "red"}}), ValidationError);

  // Precondition of the owning module.
  o = run_json({{"command", "airy-profile"}, {"n", 16}, {"tau", 1.0}, {"grid", {{"eta", "0:0:1"}}}});
  CHECK(o.code == 2);

  // Numerical refusal: the real axis inside the support has no single Green's function.
  o = run_json({{"command", "green-scan"}, {"n", 4}, {"tau", 1.0}, {"grid", {{"re", "0:1:2"}, {"im", "0:0:1"}}}});
  CHECK(o.code == 3);
  CHECK(json::parse(o.err)["exit_code"] == 3);

  o = run_json({{"command", "acp-scan"},
                {"n", 4},
                {"tau", 1.0},
                {"out", "/nonexistent/dir/x.csv"},
                {"grid", {{"re", "0:1:2"}, {"im", "0:0:1"}}}});
  CHECK(o.code == 4);
  CHECK(json::parse(o.err)["error"] == "io");
}

TEST_CASE("each command runs") {
  const std::vector<json> configs = {
      {{"command", "simulate"}, {"n", 4}, {"trials", 2}, {"seed", 1}, {"grid", {{"t", "0:1:3"}}}},
      {{"command", "aicp-scan"}, {"n", 4}, {"tau", 1.0}, {"side", "lower"}, {"grid", {{"re", "-1:1:3"}}}},
      {{"command", "green-scan"}, {"source", "-1:1,1:1"}, {"tau", 0.5}, {"grid", {{"re", "-1:1:3"}, {"im", "0.1:0.1:1"}}}},
      {{"command", "green-scan"},
       {"n", 4},
       {"tau", 1.0},
       {"mode", "saddle-landscape"},
       {"z", {0.5, 0.2}},
       {"grid", {{"re", "-1:1:3"}, {"im", "-1:1:3"}}}},
      {{"command", "airy-profile"}, {"n", 64}, {"tau", 1.0}, {"kind", "aicp"}, {"grid", {{"eta", "-1:1:3"}}}},
      {{"command", "pearcey-profile"}, {"source", "-1:32,1:32"}, {"grid", {{"kappa", "0:0:1"}, {"eta", "0:1:2"}}}},
      {{"command", "kernel-grid"}, {"tau", 1.0}, {"mode", "bh"}, {"source", "-1:1,1:1"},
       {"grid", {{"x", "0:0:1"}, {"y", "0:0:1"}}}},
      {{"command", "kernel-verify"}, {"source", "-1:2,1:2"}, {"tau", 1.0}, {"grid", {{"x", "0:0.5:2"}, {"y", "0:0:1"}}}},
  };
  for (const json& c : configs) {
    std::ostringstream out, err;
    RunConfig rc;
    int code = -1;
    try {
      rc = config_from_json(c);
      code = run(rc, out, err);
    } catch (const std::exception& e) {
      FAIL(e.what());
    }
    CAPTURE(c.dump());
    CAPTURE(err.str());
    CHECK(code == 0);
    CHECK(data_rows(out.str()).size() >= 1);
  }
}
