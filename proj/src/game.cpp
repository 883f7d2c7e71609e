#include "esaloha/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include <fmt/core.h>

#include "esaloha/error.hpp"
#include "esaloha/model.hpp"
#include "esaloha/parallel.hpp"

namespace esaloha {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

StrategyProfile nep_original(const SystemConfig& config) {
  auto caps = energy_caps(config).q_cap;
  std::vector<double> always(caps.size(), 1.0);
  return StrategyProfile::original(std::move(always), std::move(caps));
}

double throughput_ratio(double benchmark_total, double scheme_total) noexcept {
  if (scheme_total <= 0.0) return benchmark_total <= 0.0 ? 1.0 : kInf;
  return benchmark_total / scheme_total;
}

double price_of_anarchy_original(const SystemConfig& config) {
  const double optimum = algorithm1_schedule(config).total_throughput;
  return throughput_ratio(optimum, total_throughput(nep_original(config), config));
}

namespace {

// Terms of the persist-or-back-off test for one user.
struct ResponseTerms {
  double idle = 1.0;   // nobody else is ON
  double clear = 1.0;  // nobody else transmits after the probe
  double persist = 0.0;
  double back_off = 0.0;
};

ResponseTerms response_terms(std::size_t user, const StrategyProfile& profile,
                             const SystemConfig& config) {
  ResponseTerms t;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (j == user) continue;
    t.idle *= 1.0 - profile.q[j];
    t.clear *= 1.0 - profile.p[j] * profile.q[j];
  }
  t.persist = (config.c1 + config.c2 * t.idle) * t.clear;
  t.back_off = config.full_cost() * t.idle;
  return t;
}

double spend_budget(std::size_t user, double backoff, double idle, const SystemConfig& config) {
  const double cost = config.c1 + config.c2 * (backoff + (1.0 - backoff) * idle);
  return std::min(1.0, config.energy_budgets[user] / cost);
}

void require_modified(std::size_t user, const StrategyProfile& profile,
                      const SystemConfig& config) {
  if (profile.variant != Variant::Modified)
    throw ConfigError("best responses are defined for the modified strategy");
  profile.validate(config.size());
  if (user >= config.size())
    throw ConfigError(fmt::format("user {} out of range for {} users", user, config.size()));
}

}  // namespace

BestResponse best_response_modified(std::size_t user, const StrategyProfile& profile,
                                    const SystemConfig& config) {
  require_modified(user, profile, config);
  const auto t = response_terms(user, profile, config);
  BestResponse br;
  br.backoff = t.persist > t.back_off ? 1.0 : 0.0;
  br.on_probability = spend_budget(user, br.backoff, t.idle, config);
  br.indifferent = std::abs(t.persist - t.back_off) <= 1e-12 * config.full_cost();
  if (br.on_probability == 0.0) {
    br.backoff = 0.0;
    br.indifferent = true;
  }
  return br;
}

bool is_best_response(std::size_t user, const StrategyProfile& profile,
                      const SystemConfig& config, double tol) {
  require_modified(user, profile, config);
  const auto t = response_terms(user, profile, config);
  const double b = profile.p[user];
  const double q = profile.q[user];

  const double preferred = t.persist > t.back_off ? 1.0 : 0.0;
  if (spend_budget(user, preferred, t.idle, config) <= tol && q <= tol) return true;

  const bool tie = std::abs(t.persist - t.back_off) <= tol * config.full_cost();
  for (double candidate : {preferred, 1.0 - preferred}) {
    if (candidate != preferred && !tie) break;
    if (std::abs(b - candidate) > tol) continue;
    if (std::abs(q - spend_budget(user, candidate, t.idle, config)) <= tol) return true;
  }
  return false;
}

bool is_equilibrium(const StrategyProfile& profile, const SystemConfig& config, double tol) {
  for (std::size_t i = 0; i < config.size(); ++i)
    if (!is_best_response(i, profile, config, tol)) return false;
  return true;
}

StrategyProfile canonicalize_modified(StrategyProfile profile) {
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (profile.q[i] == 0.0) profile.p[i] = 0.0;
  return profile;
}

const char* to_string(DynamicsKind kind) noexcept {
  switch (kind) {
    case DynamicsKind::Converged: return "converged";
    case DynamicsKind::Cycle: return "cycle";
    case DynamicsKind::MaxRounds: return "max_rounds";
  }
  return "unknown";
}

namespace {

std::vector<long long> quantize(const StrategyProfile& profile, double tol) {
  std::vector<long long> key;
  key.reserve(2 * profile.size());
  for (double v : profile.p) key.push_back(std::llround(v / tol));
  for (double v : profile.q) key.push_back(std::llround(v / tol));
  return key;
}

}  // namespace

DynamicsOutcome best_response_dynamics(const SystemConfig& config,
                                       const StrategyProfile& initial,
                                       const DynamicsOptions& options) {
  config.validate();
  if (initial.variant != Variant::Modified)
    throw ConfigError("best-response dynamics runs on modified-strategy profiles");
  initial.validate(config.size());
  if (!(options.tol > 0.0)) throw ConfigError("dynamics tolerance must be > 0");

  DynamicsOutcome out;
  out.final_profile = initial;
  auto& profile = out.final_profile;

  std::vector<std::size_t> order(config.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffler(options.order_seed.value_or(0));

  std::set<std::vector<long long>> seen{quantize(profile, options.tol)};
  for (std::size_t round = 1; round <= options.max_rounds; ++round) {
    out.rounds = round;
    if (options.order_seed) std::shuffle(order.begin(), order.end(), shuffler);
    double moved = 0.0;
    for (std::size_t user : order) {
      const auto br = best_response_modified(user, profile, config);
      moved = std::max({moved, std::abs(br.backoff - profile.p[user]),
                        std::abs(br.on_probability - profile.q[user])});
      profile.p[user] = br.backoff;
      profile.q[user] = br.on_probability;
      ++out.trajectory_length;
    }
    if (moved <= options.tol) {
      out.kind = DynamicsKind::Converged;
      return out;
    }
    if (!seen.insert(quantize(profile, options.tol)).second) {
      out.kind = DynamicsKind::Cycle;
      return out;
    }
  }
  out.kind = DynamicsKind::MaxRounds;
  return out;
}

namespace {

double profile_distance(const StrategyProfile& a, const StrategyProfile& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max({d, std::abs(a.p[i] - b.p[i]), std::abs(a.q[i] - b.q[i])});
  return d;
}

}  // namespace

EnumerationResult enumerate_neps_modified(const SystemConfig& config, double tol,
                                          const FixedPointOptions& fixed_point,
                                          unsigned threads) {
  config.validate();
  const std::size_t n = config.size();
  if (n > kEnumerationMaxUsers)
    throw GuardError(fmt::format("equilibrium enumeration over {} users exceeds {}", n,
                                 kEnumerationMaxUsers));
  if (!(tol >= 0.0)) throw ConfigError("equilibrium tolerance must be >= 0");
  const auto caps = energy_caps(config).q_cap;

  const std::uint64_t patterns = std::uint64_t{1} << n;
  constexpr std::uint64_t kChunks = 64;
  const std::uint64_t chunk_size = (patterns + kChunks - 1) / kChunks;
  std::vector<std::vector<StrategyProfile>> found(kChunks);
  std::vector<std::size_t> skipped(kChunks, 0);

  parallel_for(kChunks, threads, [&](std::size_t chunk) {
    const std::uint64_t begin = chunk * chunk_size;
    const std::uint64_t end = std::min(patterns, begin + chunk_size);
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      std::vector<double> backoff(n, 0.0);
      std::vector<double> pinned(n, 0.0);
      std::vector<bool> free(n, true);
      for (std::size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1U) {
          backoff[i] = 1.0;
          pinned[i] = caps[i];
          free[i] = false;
        }
      std::vector<double> q;
      try {
        q = solve_backoff_fixed_point(config, std::move(pinned), free, fixed_point);
      } catch (const SolverError&) {
        ++skipped[chunk];
        continue;
      }
      auto profile = StrategyProfile::modified(std::move(backoff), std::move(q));
      if (is_equilibrium(profile, config, tol))
        found[chunk].push_back(canonicalize_modified(std::move(profile)));
    }
  });

  EnumerationResult result;
  for (std::size_t chunk = 0; chunk < kChunks; ++chunk) {
    result.skipped_patterns += skipped[chunk];
    for (auto& profile : found[chunk]) {
      const bool duplicate =
          std::any_of(result.equilibria.begin(), result.equilibria.end(), [&](const Equilibrium& e) {
            return profile_distance(e.profile, profile) < kEquilibriumDedupTol;
          });
      if (duplicate) continue;
      auto metrics = evaluate(profile, config);
      result.equilibria.push_back({std::move(profile), std::move(metrics), false});
    }
  }

  std::stable_sort(result.equilibria.begin(), result.equilibria.end(),
                   [](const Equilibrium& a, const Equilibrium& b) {
                     return a.metrics.total_throughput > b.metrics.total_throughput;
                   });

  auto& eq = result.equilibria;
  for (std::size_t a = 0; a < eq.size(); ++a)
    for (std::size_t b = a + 1; b < eq.size(); ++b) {
      double gap = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        gap = std::max(gap, std::abs(eq[a].metrics.throughput[i] - eq[b].metrics.throughput[i]));
      if (gap <= 1e-9) eq[a].payoff_equivalent = eq[b].payoff_equivalent = true;
    }
  return result;
}

const char* to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::Alg1: return "alg1";
    case Scheme::Fair: return "fair";
    case Scheme::NepOriginal: return "nep_original";
    case Scheme::ModifiedOpt: return "modified_opt";
    case Scheme::ModifiedGame: return "modified_game";
  }
  return "unknown";
}

DegradationReport degradation_report(const SystemConfig& config, const ReportOptions& options) {
  config.validate();
  DegradationReport report;
  report.benchmark = algorithm2_schedule(config, options.search);
  const double benchmark = report.benchmark.total_throughput;

  auto enumeration = enumerate_neps_modified(config, options.equilibrium_tol,
                                             options.search.fixed_point, options.search.threads);
  auto& game = report.modified_game;
  game.benchmark_total = benchmark;
  game.skipped_patterns = enumeration.skipped_patterns;
  game.equilibria = std::move(enumeration.equilibria);
  if (game.equilibria.empty()) {
    game.poa = game.pos = game.mean_total_throughput = kNaN;
  } else {
    double total = 0.0;
    for (const auto& e : game.equilibria) total += e.metrics.total_throughput;
    game.mean_total_throughput = total / static_cast<double>(game.equilibria.size());
    game.pos = throughput_ratio(benchmark, game.equilibria.front().metrics.total_throughput);
    game.poa = throughput_ratio(benchmark, game.equilibria.back().metrics.total_throughput);
  }

  const bool any_budget = sum(config.energy_budgets) > 0.0;
  const double alg1 = algorithm1_schedule(config).total_throughput;
  const double fair = any_budget ? total_throughput(fair_allocation(config), config) : 0.0;
  const double nep = total_throughput(nep_original(config), config);
  report.schemes = {
      {Scheme::Alg1, alg1, throughput_ratio(benchmark, alg1)},
      {Scheme::Fair, fair, throughput_ratio(benchmark, fair)},
      {Scheme::NepOriginal, nep, throughput_ratio(benchmark, nep)},
      {Scheme::ModifiedOpt, benchmark, throughput_ratio(benchmark, benchmark)},
  };
  return report;
}

}  // namespace esaloha
