// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "cli_test_util.hpp"
#include "esaloha/game.hpp"
#include "esaloha/lab.hpp"
#include "esaloha/model.hpp"
#include "esaloha/optimizers.hpp"
#include "esaloha/sim.hpp"
#include "oracle.hpp"

namespace esaloha {
namespace {

constexpr double kC1 = 50, kC2 = 70;
const SystemConfig kFiveUser = make_config({30, 25, 15, 10, 5}, kC1, kC2);

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

Verdict sim_agreement() {
  Verdict v;
  const auto profile = algorithm1_schedule(kFiveUser).profile;
  const auto start = std::chrono::steady_clock::now();
  const auto sim = simulate_original(profile, kFiveUser, {.frames = 100'000, .slots_per_frame = 100, .seed = 42, .threads = 1});
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto t = mean_throughput_original(profile, kFiveUser);
  const auto e = mean_energy_original(profile, kFiveUser);
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt = std::abs(sim.mean_throughput[i] - t[i]);
    const double de = std::abs(sim.mean_energy[i] - e[i]);
    v.require(dt <= 3 * sim.stderr_throughput[i], fmt::format("user {} throughput outside 3 stderr", i + 1));
    v.require(de <= 3 * sim.stderr_energy[i], fmt::format("user {} energy outside 3 stderr", i + 1));
    const double rel_t = dt / t[i], rel_e = de / e[i];
    worst_rel = std::max({worst_rel, rel_t, rel_e});
    v.require(rel_t <= 0.01, fmt::format("user {} throughput {} vs {} ({:.2f}% off, {:.2f} stderr)", i + 1,
                                         sim.mean_throughput[i], t[i], 100 * rel_t, dt / sim.stderr_throughput[i]));
    v.require(rel_e <= 0.01, fmt::format("user {} energy {} vs {} ({:.2f}% off)", i + 1, sim.mean_energy[i], e[i],
                                         100 * rel_e));
  }
  v.require(seconds < 30.0, fmt::format("took {:.1f} s", seconds));
  if (v.pass) v.detail = fmt::format("worst relative error {:.3f}%, {:.2f} s", 100 * worst_rel, seconds);
  return v;
}

Verdict alg1_optimality() {
  Verdict v;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 8);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const auto config = make_config(oracle::random_budgets(rng, size(rng), 2 * (kC1 + kC2)), kC1, kC2);
    const double alg1 = algorithm1_schedule(config).total_throughput;
    const double best = grid_oracle_original(config, 0.1, 10'000, 1000 + k).total_throughput;
    worst = std::max(worst, best - alg1);
    v.require(best <= alg1 + 1e-9, fmt::format("instance {}: oracle {} > alg1 {}", k, best, alg1));
  }
  if (v.pass) v.detail = fmt::format("100 instances, max oracle excess {:.3g}", worst);
  return v;
}

Verdict access_projection() {
  Verdict v;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 10'000; ++k) {
    const std::size_t n = 1 + k % 8;
    const auto config = make_config(oracle::random_budgets(rng, n, 2 * (kC1 + kC2)), kC1, kC2);
    std::vector<double> p(n), q(n);
    double expected_drop = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = unit(rng);
      q[i] = unit(rng) * std::min(1.0, config.energy_budgets[i] / (kC1 + kC2 * p[i]));
      expected_drop += kC1 * q[i] * (1 - p[i]);
    }
    const auto before = StrategyProfile::original(p, q);
    const auto after = project_lemma1(before);
    const auto tb = mean_throughput_original(before, config), ta = mean_throughput_original(after, config);
    const auto eb = mean_energy_original(before, config), ea = mean_energy_original(after, config);
    double drop = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v.require(std::abs(tb[i] - ta[i]) <= 1e-12, fmt::format("trial {}: throughput moved", k));
      drop += eb[i] - ea[i];
    }
    v.require(std::abs(drop - expected_drop) <= 1e-9, fmt::format("trial {}: energy drop {} vs {}", k, drop, expected_drop));
    v.require(is_feasible(after, config).feasible, fmt::format("trial {}: projection infeasible", k));
  }
  if (v.pass) v.detail = "10000 profiles";
  return v;
}

Verdict five_user_values() {
  Verdict v;
  const auto r = algorithm1_schedule(kFiveUser);
  const std::vector<double> expected{0.25, 0.208333, 0.125, 0.083333, 0.041667};
  v.require(r.active_set.size() == 5, fmt::format("{} users active", r.active_set.size()));
  for (std::size_t i = 0; i < 5; ++i)
    v.require(std::abs(r.profile.q[i] - expected[i]) <= 1e-6, fmt::format("q{} = {}", i + 1, r.profile.q[i]));
  v.require(std::abs(r.total_throughput - 0.39877) <= 1e-4, fmt::format("total {}", r.total_throughput));
  const double oracle_total = grid_oracle_original(kFiveUser, 0.1, 10'000, 1).total_throughput;
  v.require(oracle_total <= r.total_throughput + 1e-9, fmt::format("oracle {} beats it", oracle_total));
  if (v.pass) v.detail = fmt::format("total {}", r.total_throughput);
  return v;
}

Verdict modified_dominance() {
  Verdict v;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> size(2, 6);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const auto config = make_config(oracle::random_budgets(rng, size(rng), 2 * (kC1 + kC2)), kC1, kC2);
    const double a1 = algorithm1_schedule(config).total_throughput;
    const double a2 = algorithm2_schedule(config).total_throughput;
    worst = std::min(worst, a2 - a1);
    v.require(a2 >= a1 - 1e-9, fmt::format("instance {}: alg2 {} < alg1 {}", k, a2, a1));
  }
  if (v.pass) v.detail = fmt::format("100 instances, min margin {:.3g}", worst);
  return v;
}

Verdict original_equilibrium() {
  Verdict v;
  std::mt19937_64 rng(5);
  std::vector<SystemConfig> deviation_set{kFiveUser, make_config({120, 120}, kC1, kC2)};
  for (int k = 0; k < 20; ++k)
    deviation_set.push_back(make_config(oracle::random_budgets(rng, 1 + k % 4, 2 * (kC1 + kC2)), kC1, kC2));
  for (const auto& config : deviation_set) {
    const auto nep = nep_original(config);
    const auto base = mean_throughput_original(nep, config);
    for (std::size_t i = 0; i < config.size(); ++i) {
      auto p = nep.p, q = nep.q;
      for (int a = 0; a <= 100; ++a)
        for (int b = 0; b <= 100; ++b) {
          p[i] = a / 100.0;
          q[i] = b / 100.0;
          if (q[i] * (kC1 + kC2 * p[i]) > config.energy_budgets[i]) continue;
          const double gain = p[i] * q[i] * oracle::others_product(p, q, i) - base[i];
          v.require(gain <= 1e-9, fmt::format("user {} improves by {}", i + 1, gain));
        }
    }
  }
  for (int k = 0; k < 100; ++k) {
    const auto config = make_config(oracle::random_budgets(rng, 1 + k % 8, 2 * (kC1 + kC2)), kC1, kC2);
    const double poa = price_of_anarchy_original(config);
    v.require(poa >= 1.0, fmt::format("PoA {} below one", poa));
  }
  const double five = price_of_anarchy_original(kFiveUser);
  v.require(std::abs(five - 1.0) <= 1e-9, fmt::format("five-user PoA {}", five));
  const double jammed = price_of_anarchy_original(make_config({120, 120}, kC1, kC2));
  v.require(std::isinf(jammed) && jammed > 0, fmt::format("[120,120] PoA {}", jammed));
  if (v.pass) v.detail = fmt::format("{} deviation instances, PoA(five-user) = {}, PoA([120,120]) = inf",
                                     deviation_set.size(), five);
  return v;
}

Verdict pair_game() {
  Verdict v;
  const auto pair = make_config({30, 25}, kC1, kC2);
  const auto report = degradation_report(pair);
  const auto& neps = report.modified_game.equilibria;
  v.require(neps.size() == 2, fmt::format("{} equilibria", neps.size()));
  auto has = [&](std::vector<double> b, std::vector<double> q) {
    return std::any_of(neps.begin(), neps.end(), [&](const Equilibrium& e) {
      for (std::size_t i = 0; i < 2; ++i)
        if (std::abs(e.profile.p[i] - b[i]) > 1e-5 || std::abs(e.profile.q[i] - q[i]) > 1e-5) return false;
      return true;
    });
  };
  v.require(has({1, 0}, {0.25, 0.243902}), "missing (1,0) equilibrium");
  v.require(has({0, 1}, {0.284585, 0.208333}), "missing (0,1) equilibrium");
  v.require(std::abs(report.modified_game.pos - 1.0) <= 1e-6, fmt::format("pos {}", report.modified_game.pos));
  v.require(std::abs(report.modified_game.poa - 1.0016) <= 1e-3, fmt::format("poa {}", report.modified_game.poa));
  if (v.pass) v.detail = fmt::format("pos {}, poa {}", report.modified_game.pos, report.modified_game.poa);
  return v;
}

Verdict dynamics_soundness() {
  Verdict v;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SystemConfig> instances{kFiveUser, make_config({30, 25}, kC1, kC2), make_config({120, 120}, kC1, kC2)};
  for (int k = 0; k < 17; ++k)
    instances.push_back(make_config(oracle::random_budgets(rng, 2 + k % 5, 2 * (kC1 + kC2)), kC1, kC2));
  std::size_t converged = 0, other = 0;
  for (const auto& config : instances) {
    const auto neps = enumerate_neps_modified(config, 1e-9).equilibria;
    for (int s = 0; s < 20; ++s) {
      std::vector<double> b(config.size()), q(config.size());
      for (std::size_t i = 0; i < config.size(); ++i) {
        b[i] = unit(rng);
        q[i] = unit(rng);
      }
      const auto out = best_response_dynamics(config, StrategyProfile::modified(b, q));
      if (out.kind != DynamicsKind::Converged) {
        ++other;
        v.require(!is_equilibrium(out.final_profile, config, 1e-9) || out.kind == DynamicsKind::Cycle ||
                      out.kind == DynamicsKind::MaxRounds,
                  "unlabelled non-converged outcome");
        continue;
      }
      ++converged;
      const bool matched = std::any_of(neps.begin(), neps.end(), [&](const Equilibrium& e) {
        for (std::size_t i = 0; i < config.size(); ++i)
          if (std::abs(e.profile.p[i] - out.final_profile.p[i]) > 1e-6 ||
              std::abs(e.profile.q[i] - out.final_profile.q[i]) > 1e-6)
            return false;
        return true;
      });
      v.require(matched, fmt::format("converged profile not enumerated ({} users)", config.size()));
      v.require(is_equilibrium(out.final_profile, config, 1e-9), "converged profile is not an equilibrium");
    }
  }
  if (v.pass) v.detail = fmt::format("{} instances, {} converged, {} cycle/max-rounds", instances.size(), converged, other);
  return v;
}

Verdict sweep_trend() {
  Verdict v;
  const auto cfg = parse_config_file(test::kSourceDir / "scenarios" / "five_user.json");
  SweepSpec spec;
  spec.schemes = {Scheme::NepOriginal};
  const auto rows = run_sweep(cfg, spec);
  std::optional<double> reference;
  std::size_t saturated = 0;
  for (const auto& row : rows) {
    v.require(row.ok(), fmt::format("e1 = {}: {}", *row.param_value, row.status));
    if (!row.ok() || *row.param_value < 120) continue;
    ++saturated;
    if (!reference) reference = *row.degradation;
    v.require(std::abs(*row.degradation - *reference) <= 1e-9, fmt::format("degradation moves at e1 = {}", *row.param_value));
    v.require(std::abs(*row.total_throughput - 0.60853) <= 1e-4, fmt::format("total {} at e1 = {}", *row.total_throughput, *row.param_value));
  }
  v.require(saturated > 0, "no sweep points at or above 120");
  if (v.pass) v.detail = fmt::format("{} points at e1 >= 120, degradation {}", saturated, *reference);
  return v;
}

Verdict cli_determinism() {
  Verdict v;
  const std::string five = (test::kSourceDir / "scenarios" / "five_user.json").string();
  const std::vector<std::vector<std::string>> commands{
      {"analyze", "--q", "0.25,0.2,0.1,0.05,0.01"},
      {"optimize", "--method", "alg1"},
      {"optimize", "--method", "fair"},
      {"optimize", "--method", "alg2"},
      {"optimize", "--method", "oracle"},
      {"game", "--variant", "original"},
      {"game", "--variant", "modified"},
      {"game", "--variant", "modified", "--dynamics", "--order-seed", "3"},
      {"simulate", "--variant", "original", "--profile", "alg1"},
      {"simulate", "--variant", "modified", "--profile", "alg2"},
      {"sweep", "--param", "e1"},
      {"sweep", "--param", "c2", "--steps", "10"},
  };
  for (const auto& cmd : commands) {
    std::string first;
    int run = 0;
    for (const char* threads : {"1", "4", "1", "3"}) {
      const auto out = test::scratch(fmt::format("determinism-{}.csv", run++));
      auto args = cmd;
      args.insert(args.end(), {"--config", five, "--format", "csv", "--threads", threads, "--out", out.string()});
      const auto r = test::run_cli(args);
      v.require(r.code == 0, fmt::format("{} exited {}: {}", cmd[0], r.code, r.diagnostics));
      const auto text = test::slurp(out);
      if (first.empty()) first = text;
      v.require(!text.empty() && text == first, fmt::format("{} output differs with --threads {}", cmd[0], threads));
    }
  }
  if (v.pass) v.detail = fmt::format("{} commands, 4 runs each", commands.size());
  return v;
}

}  // namespace
}  // namespace esaloha

int main(int argc, char** argv) {
  using namespace esaloha;
  struct Criterion {
    const char* name;
    Verdict (*check)();
  };
  const Criterion criteria[] = {
      {"simulation matches analysis", sim_agreement},
      {"greedy activation is optimal", alg1_optimality},
      {"access projection", access_projection},
      {"five-user schedule values", five_user_values},
      {"backoff schedule dominates", modified_dominance},
      {"original-game equilibrium and PoA", original_equilibrium},
      {"two-user backoff game", pair_game},
      {"best-response dynamics soundness", dynamics_soundness},
      {"e1 sweep saturation", sweep_trend},
      {"CLI determinism", cli_determinism},
  };
  // An optional argument runs a single criterion (1-based).
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0, ran = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    if (only != 0 && only != index) continue;
    ++ran;
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    fmt::print("criterion {:2} {} {}: {}\n", index, v.pass ? "PASS" : "FAIL", c.name, v.detail);
    std::fflush(stdout);
  }
  if (ran == 0) {
    fmt::print(stderr, "no criterion {}\n", argv[1]);
    return 2;
  }
  fmt::print("{} of {} criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
