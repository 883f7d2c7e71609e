#pragma once

// Scenario files, parameter sweeps and tabular output for the command-line
// front end.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "esaloha/game.hpp"
#include "esaloha/types.hpp"

namespace esaloha {

struct SimSettings {
  std::uint64_t frames = 100'000;
  std::uint32_t slots_per_frame = 100;
  std::uint64_t seed = 42;
};

struct SolverSettings {
  double tol = 1e-10;
  std::size_t max_iter = 10'000;
  bool n_guard_override = false;
};

struct ScenarioConfig {
  SystemConfig system;
  std::vector<std::string> labels;  ///< one per user; "u1", "u2", ... when absent
  SimSettings sim;
  SolverSettings solver;
};

/// Parses a JSON scenario document with keys c1, c2, energy_budgets and the
/// optional labels, sim {frames, slots_per_frame, seed} and
/// solver {tol, max_iter, n_guard_override}. Unknown keys are rejected.
/// Throws ConfigError naming the offending line or field.
ScenarioConfig parse_config(std::istream& in, std::string_view source = "<stream>");
ScenarioConfig parse_config_file(const std::filesystem::path& path);

enum class SweepParameter { E1, C2 };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::E1;
  double from = 5.0;
  double to = 200.0;
  std::size_t steps = 40;
  std::vector<Scheme> schemes{Scheme::Alg1, Scheme::Fair, Scheme::NepOriginal,
                              Scheme::ModifiedOpt, Scheme::ModifiedGame};

  /// Throws ConfigError unless 0 <= from < to, steps >= 2 and schemes is non-empty.
  void validate() const;
  /// `steps` evenly spaced values from `from` to `to` inclusive.
  std::vector<double> values() const;
};

std::optional<SweepParameter> parse_sweep_parameter(std::string_view text);
std::optional<Scheme> parse_scheme(std::string_view text);

/// One line of the summary table. Absent optionals render as empty cells.
struct ResultRow {
  std::optional<double> param_value;
  std::string scheme;
  std::optional<double> total_throughput;
  std::optional<double> degradation;
  std::optional<double> poa;
  std::optional<double> pos;
  std::optional<double> mean_total;
  std::optional<std::size_t> nep_count;
  std::string status = "ok";

  bool ok() const noexcept { return status == "ok"; }
};

/// For every sweep point the swept value replaces e_1 (first listed user) or
/// c2, the degradation report is computed, and one row per requested scheme
/// is produced. Rows are ordered by (param_value, scheme order in
/// SweepSpec::schemes). Solver failures become per-row statuses.
std::vector<ResultRow> run_sweep(const ScenarioConfig& config, const SweepSpec& spec,
                                 unsigned threads = 1);

enum class OutputFormat { Csv, Json };

std::optional<OutputFormat> parse_output_format(std::string_view text);

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

inline constexpr std::string_view kResultsHeader =
    "param_value,scheme,total_throughput,degradation,poa,pos,mean_total,nep_count,status";

/// Shortest round-trip decimal; "inf" / "-inf" / "nan" for non-finite values.
std::string format_number(double value);

Table results_table(const std::vector<ResultRow>& rows);

/// CSV: header line then one line per row, '\n' terminated. JSON: an array
/// of objects keyed by the header; empty cells are null and non-finite
/// numbers are strings.
void emit_table(const Table& table, OutputFormat format, std::ostream& out);

void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, std::ostream& out);

/// Writes to `path`, or to stdout when `path` is empty or "-".
/// Throws IoError when the destination cannot be written.
void write_table(const Table& table, OutputFormat format, const std::string& path);

}  // namespace esaloha
