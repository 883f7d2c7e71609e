#include <fmt/core.h>

#include "esaloha/error.hpp"
#include "esaloha/lab.hpp"
#include "esaloha/parallel.hpp"

namespace esaloha {

void SweepSpec::validate() const {
  if (!(from >= 0.0)) throw ConfigError(fmt::format("sweep start {} must be >= 0", from));
  if (!(from < to)) throw ConfigError(fmt::format("sweep range [{}, {}] is empty", from, to));
  if (steps < 2) throw ConfigError("sweep needs at least 2 steps");
  if (schemes.empty()) throw ConfigError("sweep needs at least one scheme");
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> v(steps);
  const double width = to - from;
  for (std::size_t k = 0; k < steps; ++k)
    v[k] = from + width * static_cast<double>(k) / static_cast<double>(steps - 1);
  v.back() = to;
  return v;
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view text) {
  if (text == "e1") return SweepParameter::E1;
  if (text == "c2") return SweepParameter::C2;
  return std::nullopt;
}

std::optional<Scheme> parse_scheme(std::string_view text) {
  for (Scheme s : {Scheme::Alg1, Scheme::Fair, Scheme::NepOriginal, Scheme::ModifiedOpt,
                   Scheme::ModifiedGame})
    if (text == to_string(s)) return s;
  return std::nullopt;
}

namespace {

std::vector<ResultRow> sweep_point(const ScenarioConfig& config, const SweepSpec& spec,
                                   double value) {
  SystemConfig system = config.system;
  if (spec.parameter == SweepParameter::E1)
    system.energy_budgets.front() = value;
  else
    system.c2 = value;

  std::vector<ResultRow> rows;
  for (Scheme s : spec.schemes) {
    ResultRow row;
    row.param_value = value;
    row.scheme = to_string(s);
    rows.push_back(std::move(row));
  }
  auto fail_all = [&](const char* status) {
    for (auto& r : rows) r.status = status;
    return rows;
  };

  ReportOptions options;
  options.search.fixed_point.tol = config.solver.tol;
  options.search.fixed_point.max_iter = config.solver.max_iter;
  options.search.allow_large_n = config.solver.n_guard_override;

  DegradationReport report;
  try {
    system.validate();
    report = degradation_report(system, options);
  } catch (const GuardError&) {
    return fail_all("guard");
  } catch (const ConfigError&) {
    return fail_all("config_error");
  } catch (const SolverError&) {
    return fail_all("solver_error");
  }

  for (auto& row : rows) {
    const Scheme s = *parse_scheme(row.scheme);
    if (s == Scheme::ModifiedGame) {
      const auto& game = report.modified_game;
      row.total_throughput = game.mean_total_throughput;
      row.degradation = throughput_ratio(game.benchmark_total, game.mean_total_throughput);
      row.poa = game.poa;
      row.pos = game.pos;
      row.mean_total = game.mean_total_throughput;
      row.nep_count = game.equilibria.size();
      if (game.equilibria.empty()) row.status = "no_equilibrium";
      continue;
    }
    for (const auto& d : report.schemes)
      if (d.scheme == s) {
        row.total_throughput = d.total_throughput;
        row.degradation = d.degradation;
      }
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_sweep(const ScenarioConfig& config, const SweepSpec& spec,
                                 unsigned threads) {
  spec.validate();
  config.system.validate();
  const auto values = spec.values();
  std::vector<std::vector<ResultRow>> per_point(values.size());
  parallel_for(values.size(), threads,
               [&](std::size_t k) { per_point[k] = sweep_point(config, spec, values[k]); });

  std::vector<ResultRow> rows;
  for (auto& point : per_point)
    for (auto& row : point) rows.push_back(std::move(row));
  return rows;
}

}  // namespace esaloha
