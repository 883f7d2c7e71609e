#include "cli_app.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "esaloha/error.hpp"
#include "esaloha/game.hpp"
#include "esaloha/lab.hpp"
#include "esaloha/model.hpp"
#include "esaloha/optimizers.hpp"
#include "esaloha/sim.hpp"

namespace esaloha::cli {

namespace {

struct CommonOptions {
  std::string config_path;
  std::string format = "csv";
  std::string out;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--config", common.config_path, "Scenario file (JSON)")->required();
  cmd->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", common.out, "Output path (stdout when omitted)");
  cmd->add_option("--threads", common.threads, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 1024u));
}

OutputFormat format_of(const CommonOptions& common) { return *parse_output_format(common.format); }

Variant parse_variant(const std::string& text) {
  return text == "modified" ? Variant::Modified : Variant::Original;
}

std::string label(const ScenarioConfig& cfg, std::size_t i) { return cfg.labels.at(i); }

Cell number_or_empty(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

// Per-user evaluation table shared by analyze and optimize.
Table profile_table(const ScenarioConfig& cfg, const StrategyProfile& profile,
                    const std::vector<std::string>& roles) {
  const auto metrics = evaluate(profile, cfg.system);
  const auto feas = is_feasible(profile, cfg.system);
  Table t;
  t.header = {"user", "label", "variant", "role", "p", "q", "throughput", "energy", "budget", "slack"};
  for (std::size_t i = 0; i < profile.size(); ++i) {
    t.rows.push_back({static_cast<std::int64_t>(i + 1), label(cfg, i), to_string(profile.variant),
                      roles.empty() ? Cell{} : Cell{roles[i]}, profile.p[i], profile.q[i],
                      metrics.throughput[i], metrics.energy[i], cfg.system.energy_budgets[i],
                      feas.slack[i]});
  }
  t.rows.push_back({Cell{}, std::string("total"), to_string(profile.variant),
                    std::string(feas.feasible ? "feasible" : "infeasible"), Cell{}, Cell{},
                    metrics.total_throughput, sum(metrics.energy), sum(cfg.system.energy_budgets),
                    Cell{}});
  return t;
}

StrategyProfile explicit_profile(Variant variant, std::vector<double> p, std::vector<double> q,
                                 std::size_t users) {
  if (q.empty()) throw ConfigError("--q is required for an explicit profile");
  if (p.empty()) p.assign(q.size(), 1.0);
  StrategyProfile profile{variant, std::move(p), std::move(q)};
  profile.validate(users);
  return profile;
}

ModifiedSearchOptions search_options(const ScenarioConfig& cfg, unsigned threads) {
  ModifiedSearchOptions o;
  o.fixed_point.tol = cfg.solver.tol;
  o.fixed_point.max_iter = cfg.solver.max_iter;
  o.allow_large_n = cfg.solver.n_guard_override;
  o.threads = threads;
  return o;
}

std::vector<std::string> alg2_roles(const PartitionAssignment& partition, std::size_t n) {
  std::vector<std::string> roles(n, "passive");
  for (auto i : partition.aggressive) roles[i] = "aggressive";
  for (auto i : partition.conservative) roles[i] = "conservative";
  return roles;
}

Table equilibria_table(const ScenarioConfig& cfg, const std::vector<Equilibrium>& equilibria) {
  Table t;
  t.header = {"nep", "user", "label", "backoff", "q", "throughput", "energy", "total_throughput",
              "payoff_equivalent"};
  for (std::size_t k = 0; k < equilibria.size(); ++k) {
    const auto& e = equilibria[k];
    for (std::size_t i = 0; i < e.profile.size(); ++i)
      t.rows.push_back({static_cast<std::int64_t>(k + 1), static_cast<std::int64_t>(i + 1),
                        label(cfg, i), e.profile.p[i], e.profile.q[i], e.metrics.throughput[i],
                        e.metrics.energy[i], e.metrics.total_throughput,
                        std::string(e.payoff_equivalent ? "true" : "false")});
  }
  return t;
}

StrategyProfile seed_profile(const std::string& spec, const ScenarioConfig& cfg) {
  const auto caps = energy_caps(cfg.system).q_cap;
  const std::size_t n = cfg.system.size();
  if (spec == "aggressive") return StrategyProfile::modified(std::vector<double>(n, 1.0), caps);
  if (spec == "conservative") return StrategyProfile::modified(std::vector<double>(n, 0.0), caps);
  // "<backoff list>/<q list>"
  const auto slash = spec.find('/');
  if (slash == std::string::npos)
    throw ConfigError("--seed-profile expects aggressive, conservative or B1,B2,../Q1,Q2,..");
  auto parse_list = [](const std::string& text) {
    std::vector<double> v;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      try {
        v.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("--seed-profile: '{}' is not a number", item));
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return v;
  };
  auto profile = StrategyProfile::modified(parse_list(spec.substr(0, slash)),
                                           parse_list(spec.substr(slash + 1)));
  profile.validate(n);
  return profile;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& err) {
  CLI::App app{"Energy-constrained slotted ALOHA: analysis, scheduling, games and simulation"};
  app.require_subcommand(1);

  // analyze
  CommonOptions analyze_common;
  std::string analyze_variant = "original";
  std::vector<double> analyze_p, analyze_q;
  auto* analyze = app.add_subcommand("analyze", "Evaluate mean throughput and energy of a profile");
  add_common(analyze, analyze_common);
  analyze->add_option("--variant", analyze_variant)->check(CLI::IsMember({"original", "modified"}));
  analyze->add_option("--p", analyze_p, "Access (or backoff) probabilities; default all ones")
      ->delimiter(',');
  analyze->add_option("--q", analyze_q, "ON probabilities")->delimiter(',')->required();

  // optimize
  CommonOptions optimize_common;
  std::string method = "alg1";
  std::vector<double> weights;
  double oracle_step = 0.1;
  std::size_t oracle_samples = 10'000;
  std::uint64_t oracle_seed = 1;
  auto* optimize = app.add_subcommand("optimize", "Compute a social-optimum schedule");
  add_common(optimize, optimize_common);
  optimize->add_option("--method", method)->check(CLI::IsMember({"alg1", "fair", "alg2", "oracle"}));
  optimize->add_option("--weights", weights, "Fair weights; default budget-proportional")
      ->delimiter(',');
  optimize->add_option("--oracle-step", oracle_step);
  optimize->add_option("--oracle-samples", oracle_samples);
  optimize->add_option("--oracle-seed", oracle_seed);

  // game
  CommonOptions game_common;
  std::string game_variant = "original";
  bool dynamics = false;
  std::string seed_spec = "aggressive";
  std::size_t max_rounds = 1'000;
  std::optional<std::uint64_t> order_seed;
  std::string detail_path;
  double eq_tol = 1e-9;
  auto* game = app.add_subcommand("game", "Equilibria of the original or backoff game");
  add_common(game, game_common);
  game->add_option("--variant", game_variant)->check(CLI::IsMember({"original", "modified"}));
  auto* enumerate_flag = game->add_flag("--enumerate", "Enumerate equilibria (default)");
  game->add_flag("--dynamics", dynamics, "Run best-response dynamics instead")->excludes(enumerate_flag);
  game->add_option("--seed-profile", seed_spec,
                   "Dynamics start: aggressive, conservative or B1,B2,../Q1,Q2,..");
  game->add_option("--max-rounds", max_rounds);
  game->add_option("--order-seed", order_seed, "Shuffle update order each round");
  game->add_option("--tol", eq_tol, "Equilibrium tolerance");
  game->add_option("--detail", detail_path, "Write per-user equilibrium profiles here");

  // simulate
  CommonOptions sim_common;
  std::string sim_variant = "original";
  std::string sim_profile = "auto";
  std::vector<double> sim_p, sim_q;
  std::optional<std::uint64_t> frames, seed;
  std::optional<std::uint32_t> slots;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo frame/slot simulation");
  add_common(simulate_cmd, sim_common);
  simulate_cmd->add_option("--variant", sim_variant)->check(CLI::IsMember({"original", "modified"}));
  simulate_cmd->add_option("--profile", sim_profile,
                           "auto (alg1 or alg2 by variant), alg1, fair, alg2 or explicit")
      ->check(CLI::IsMember({"auto", "alg1", "fair", "alg2", "explicit"}));
  simulate_cmd->add_option("--p", sim_p)->delimiter(',');
  simulate_cmd->add_option("--q", sim_q)->delimiter(',');
  simulate_cmd->add_option("--frames", frames)->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--slots", slots)->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", seed);

  // sweep
  CommonOptions sweep_common;
  std::string sweep_param = "e1";
  std::optional<double> sweep_from, sweep_to;
  std::size_t sweep_steps = 40;
  std::vector<std::string> sweep_schemes;
  auto* sweep = app.add_subcommand("sweep", "Degradation sweep over e1 or c2");
  add_common(sweep, sweep_common);
  sweep->add_option("--param", sweep_param)->check(CLI::IsMember({"e1", "c2"}));
  sweep->add_option("--from", sweep_from, "Default 5 (e1) or 10 (c2)");
  sweep->add_option("--to", sweep_to, "Default 200");
  sweep->add_option("--steps", sweep_steps);
  sweep->add_option("--schemes", sweep_schemes,
                    "Subset of alg1,fair,nep_original,modified_opt,modified_game")
      ->delimiter(',')
      ->check(CLI::IsMember({"alg1", "fair", "nep_original", "modified_opt", "modified_game"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, std::cout, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cout, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (analyze->parsed()) {
      const auto cfg = parse_config_file(analyze_common.config_path);
      const auto profile = explicit_profile(parse_variant(analyze_variant), analyze_p, analyze_q,
                                            cfg.system.size());
      write_table(profile_table(cfg, profile, {}), format_of(analyze_common), analyze_common.out);
      return kOk;
    }

    if (optimize->parsed()) {
      const auto cfg = parse_config_file(optimize_common.config_path);
      const std::size_t n = cfg.system.size();
      Table table;
      if (method == "alg1") {
        const auto r = algorithm1_schedule(cfg.system);
        std::vector<std::string> roles(n, "inactive");
        for (auto i : r.active_set) roles[i] = "active";
        table = profile_table(cfg, r.profile, roles);
      } else if (method == "fair") {
        std::optional<FairWeights> w;
        if (!weights.empty()) w = FairWeights::from(weights);
        table = profile_table(cfg, fair_allocation(cfg.system, w), {});
      } else if (method == "alg2") {
        const auto r = algorithm2_schedule(cfg.system, search_options(cfg, optimize_common.threads));
        if (r.skipped_candidates > 0)
          err << fmt::format("warning: {} partitions skipped (fixed point did not converge)\n",
                             r.skipped_candidates);
        table = profile_table(cfg, r.profile, alg2_roles(r.partition, n));
      } else {
        const auto r = grid_oracle_original(cfg.system, oracle_step, oracle_samples, oracle_seed);
        table = profile_table(
            cfg, StrategyProfile::original(std::vector<double>(n, 1.0), r.q),
            std::vector<std::string>(n, to_string(r.source)));
      }
      write_table(table, format_of(optimize_common), optimize_common.out);
      return kOk;
    }

    if (game->parsed()) {
      const auto cfg = parse_config_file(game_common.config_path);
      const auto fmt_out = format_of(game_common);
      ResultRow row;
      if (game_variant == "original") {
        const auto nep = nep_original(cfg.system);
        row.scheme = "nep_original";
        row.total_throughput = total_throughput(nep, cfg.system);
        row.poa = price_of_anarchy_original(cfg.system);
        row.degradation = row.poa;
        row.nep_count = 1;
        if (!detail_path.empty())
          write_table(profile_table(cfg, nep, {}), fmt_out, detail_path);
      } else if (dynamics) {
        DynamicsOptions opts;
        opts.max_rounds = max_rounds;
        opts.tol = cfg.solver.tol;
        opts.order_seed = order_seed;
        const auto outcome = best_response_dynamics(cfg.system, seed_profile(seed_spec, cfg), opts);
        row.scheme = "dynamics";
        row.total_throughput = total_throughput(outcome.final_profile, cfg.system);
        row.status = to_string(outcome.kind);
        if (!detail_path.empty()) {
          auto metrics = evaluate(outcome.final_profile, cfg.system);
          write_table(equilibria_table(cfg, {{outcome.final_profile, std::move(metrics), false}}),
                      fmt_out, detail_path);
        }
      } else {
        ReportOptions opts;
        opts.search = search_options(cfg, game_common.threads);
        opts.equilibrium_tol = eq_tol;
        const auto report = degradation_report(cfg.system, opts);
        const auto& g = report.modified_game;
        row.scheme = "modified_game";
        row.total_throughput = g.mean_total_throughput;
        row.degradation = throughput_ratio(g.benchmark_total, g.mean_total_throughput);
        row.poa = g.poa;
        row.pos = g.pos;
        row.mean_total = g.mean_total_throughput;
        row.nep_count = g.equilibria.size();
        if (g.equilibria.empty()) row.status = "no_equilibrium";
        if (!detail_path.empty()) write_table(equilibria_table(cfg, g.equilibria), fmt_out, detail_path);
      }
      write_table(results_table({row}), fmt_out, game_common.out);
      return kOk;
    }

    if (simulate_cmd->parsed()) {
      const auto cfg = parse_config_file(sim_common.config_path);
      const auto variant = parse_variant(sim_variant);
      const std::size_t n = cfg.system.size();
      std::string source = sim_profile;
      if (source == "auto")
        source = !sim_q.empty() ? "explicit" : (variant == Variant::Modified ? "alg2" : "alg1");
      StrategyProfile profile;
      if (source == "explicit") {
        profile = explicit_profile(variant, sim_p, sim_q, n);
      } else if (source == "alg2") {
        if (variant != Variant::Modified) throw ConfigError("--profile alg2 needs --variant modified");
        profile = algorithm2_schedule(cfg.system, search_options(cfg, sim_common.threads)).profile;
      } else {
        if (variant != Variant::Original)
          throw ConfigError(fmt::format("--profile {} needs --variant original", source));
        profile = source == "alg1" ? algorithm1_schedule(cfg.system).profile
                                   : fair_allocation(cfg.system);
      }

      SimParams params;
      params.frames = frames.value_or(cfg.sim.frames);
      params.slots_per_frame = slots.value_or(cfg.sim.slots_per_frame);
      params.seed = seed.value_or(cfg.sim.seed);
      params.threads = sim_common.threads;
      const auto est = esaloha::simulate(profile, cfg.system, params);
      const auto analytic = evaluate(profile, cfg.system);

      Table t;
      t.header = {"user", "label", "variant", "p", "q", "throughput", "throughput_stderr",
                  "analytic_throughput", "energy", "energy_stderr", "analytic_energy", "frames_on"};
      for (std::size_t i = 0; i < n; ++i)
        t.rows.push_back({static_cast<std::int64_t>(i + 1), label(cfg, i), to_string(variant),
                          profile.p[i], profile.q[i], est.mean_throughput[i],
                          est.stderr_throughput[i], analytic.throughput[i], est.mean_energy[i],
                          est.stderr_energy[i], analytic.energy[i],
                          static_cast<std::int64_t>(est.frames_on[i])});
      write_table(t, format_of(sim_common), sim_common.out);
      return kOk;
    }

    if (sweep->parsed()) {
      const auto cfg = parse_config_file(sweep_common.config_path);
      SweepSpec spec;
      spec.parameter = *parse_sweep_parameter(sweep_param);
      spec.from = sweep_from.value_or(spec.parameter == SweepParameter::E1 ? 5.0 : 10.0);
      spec.to = sweep_to.value_or(200.0);
      spec.steps = sweep_steps;
      if (!sweep_schemes.empty()) {
        spec.schemes.clear();
        for (const auto& s : sweep_schemes) spec.schemes.push_back(*parse_scheme(s));
      }
      const auto rows = run_sweep(cfg, spec, sweep_common.threads);
      write_table(results_table(rows), format_of(sweep_common), sweep_common.out);
      const bool all_failed =
          std::none_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.ok(); });
      if (all_failed) {
        err << "error: every sweep row failed\n";
        return kSolverFailure;
      }
      return kOk;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kInvalidInput;
}

}  // namespace esaloha::cli
