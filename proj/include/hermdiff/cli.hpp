#pragma once

// Run configuration, per-command dispatch and CSV/JSON output for the command-line tool.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hermdiff/errors.hpp"

namespace hermdiff::cli {

inline constexpr const char* kToolName = "hermdiff";
inline constexpr const char* kToolVersion = "1.0.0";

enum class Command {
  simulate,
  density,
  acp_scan,
  aicp_scan,
  pde_check,
  green_scan,
  caustics,
  airy_profile,
  pearcey_profile,
  kernel_grid,
  kernel_verify,
  mc_compare
};

const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

enum class Format { csv, json };

// min:max:count, evenly spaced and inclusive.
struct Axis {
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  static Axis parse(const std::string& text);
  std::vector<double> values() const;
  std::string to_string() const;
};

struct RunConfig {
  Command command = Command::acp_scan;
  std::optional<std::string> source;
  std::optional<int> n;
  std::optional<double> tau;
  std::optional<Axis> tau_range;
  std::map<std::string, Axis> grid;
  std::optional<long> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  Format format = Format::csv;
  std::optional<std::string> mode;
  std::optional<std::string> side;
  std::optional<std::string> evaluator;
  std::optional<std::string> kind;
  std::optional<Complex> z;

  // Only the fields that are set; the keys are the long flag names.
  nlohmann::json to_json() const;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Type-checks every key and rejects unknown ones; throws ValidationError.
RunConfig config_from_json(const nlohmann::json& j);

// Required and permitted fields per command, value ranges. Throws ValidationError.
void validate(const RunConfig& config);

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Validates, then evaluates the command. Module errors propagate unchanged.
Table execute(const RunConfig& config);

void write_table(const RunConfig& config, const Table& table, std::ostream& os);

// Exit status for an exception escaping execute(): 2 validation, 3 numerical, 4 I/O.
int exit_code_for(const std::exception& e);

// One-line JSON error record.
std::string error_record(const std::exception& e);

// execute() + write_table() to config.out (stdout when unset or "-"). Returns the exit
// status and prints the error record to err on failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace hermdiff::cli
