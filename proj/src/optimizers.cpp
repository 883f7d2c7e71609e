#include "esaloha/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

#include <fmt/core.h>

#include "esaloha/error.hpp"
#include "esaloha/model.hpp"
#include "esaloha/parallel.hpp"

namespace esaloha {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double reduced_total(const std::vector<double>& q, const SystemConfig& config) {
  return sum(mean_throughput_original(
      StrategyProfile::original(std::vector<double>(q.size(), 1.0), q), config));
}

}  // namespace

ActivationResult algorithm1_schedule(const SystemConfig& config) {
  const auto caps = energy_caps(config).q_cap;
  const std::size_t n = config.size();

  ActivationResult result;
  std::vector<double> q(n, 0.0);
  double load = 0.0;  // sum of q/(1-q) over active users
  for (std::size_t user : decreasing_budget_order(config)) {
    if (load >= 1.0) break;
    const double cap = caps[user];
    if (cap <= 0.0) break;  // the remaining users have zero caps too
    q[user] = cap;
    result.active_set.push_back(user);
    load += cap >= 1.0 ? kInf : cap / (1.0 - cap);
  }
  result.profile = StrategyProfile::original(std::vector<double>(n, 1.0), std::move(q));
  result.total_throughput = total_throughput(result.profile, config);
  return result;
}

FairWeights FairWeights::from(std::vector<double> w) {
  if (w.empty()) throw ConfigError("fair weights must not be empty");
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!(w[i] >= 0.0) || !std::isfinite(w[i]))
      throw ConfigError(fmt::format("fair weight w[{}] = {} must be >= 0", i, w[i]));
  const double total = sum(w);
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError(fmt::format("fair weights must sum to 1, got {}", total));
  return FairWeights{std::move(w)};
}

FairWeights FairWeights::proportional_to_budget(const SystemConfig& config) {
  config.validate();
  const double total = sum(config.energy_budgets);
  if (total <= 0.0)
    throw ConfigError("budget-proportional weights need a positive total energy budget");
  std::vector<double> w(config.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = config.energy_budgets[i] / total;
  return FairWeights{std::move(w)};
}

StrategyProfile fair_allocation(const SystemConfig& config,
                                const std::optional<FairWeights>& weights) {
  const auto w = weights ? *weights : FairWeights::proportional_to_budget(config);
  if (w.w.size() != config.size())
    throw ConfigError(fmt::format("{} fair weights for {} users", w.w.size(), config.size()));
  const auto caps = energy_caps(config).q_cap;
  std::vector<double> q(caps.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::min(w.w[i], caps[i]);
  std::vector<double> always(q.size(), 1.0);
  return StrategyProfile::original(std::move(always), std::move(q));
}

double fair_utility(const StrategyProfile& profile, const FairWeights& weights,
                    const SystemConfig& config) {
  if (weights.w.size() != config.size())
    throw ConfigError(fmt::format("{} fair weights for {} users", weights.w.size(), config.size()));
  const auto t = mean_throughput_original(profile, config);
  double u = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= 0.0) return -kInf;
    u += weights.w[i] * std::log(t[i]);
  }
  return u;
}

void PartitionAssignment::validate(std::size_t users) const {
  std::vector<int> seen(users, 0);
  for (const auto* set : {&aggressive, &conservative, &passive})
    for (std::size_t i : *set) {
      if (i >= users) throw ConfigError(fmt::format("partition names user {} of {}", i, users));
      ++seen[i];
    }
  for (std::size_t i = 0; i < users; ++i)
    if (seen[i] != 1)
      throw ConfigError(fmt::format("user {} appears {} times in the partition", i, seen[i]));
}

namespace {

// One substitution step of the backoff map for the free users.
void backoff_map(const SystemConfig& config, const std::vector<double>& q,
                 const std::vector<bool>& free, std::vector<double>& out) {
  std::vector<double> off(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) off[j] = 1.0 - q[j];
  const auto idle = leave_one_out_products(off);
  out = q;
  for (std::size_t k = 0; k < q.size(); ++k)
    if (free[k])
      out[k] = std::min(1.0, config.energy_budgets[k] / (config.c1 + config.c2 * idle[k]));
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

}  // namespace

double backoff_fixed_point_residual(const SystemConfig& config, const std::vector<double>& q,
                                    const std::vector<bool>& free) {
  std::vector<double> mapped;
  backoff_map(config, q, free, mapped);
  return max_gap(mapped, q);
}

std::vector<double> solve_backoff_fixed_point(const SystemConfig& config,
                                              std::vector<double> pinned_q,
                                              const std::vector<bool>& free,
                                              const FixedPointOptions& options) {
  if (pinned_q.size() != config.size() || free.size() != config.size())
    throw ConfigError("fixed-point inputs do not match the number of users");
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw ConfigError("fixed-point damping must lie in (0, 1]");

  std::vector<double> q = std::move(pinned_q);
  for (std::size_t k = 0; k < q.size(); ++k)
    if (free[k]) q[k] = 0.0;

  // Starting from zero the undamped map is monotone, so the iterates climb
  // to the smallest fixed point.
  std::vector<double> mapped;
  double residual = kInf;
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    backoff_map(config, q, free, mapped);
    residual = max_gap(mapped, q);
    if (residual < options.tol) return mapped;
    for (std::size_t k = 0; k < q.size(); ++k)
      if (free[k]) q[k] += options.damping * (mapped[k] - q[k]);
  }
  throw SolverError(
      fmt::format("backoff fixed point did not converge in {} iterations (residual {})",
                  options.max_iter, residual),
      residual);
}

std::vector<double> conservative_fixed_point(const PartitionAssignment& partition,
                                             const SystemConfig& config,
                                             const FixedPointOptions& options) {
  config.validate();
  partition.validate(config.size());
  const auto caps = energy_caps(config).q_cap;
  std::vector<double> q(config.size(), 0.0);
  std::vector<bool> free(config.size(), false);
  for (std::size_t i : partition.aggressive) q[i] = caps[i];
  for (std::size_t k : partition.conservative) free[k] = true;
  return solve_backoff_fixed_point(config, std::move(q), free, options);
}

namespace {

struct Candidate {
  PartitionAssignment partition;
  std::vector<double> q;
  double total = -1.0;
};

// Role digits of a base-3 code: 0 aggressive, 1 conservative, 2 passive.
PartitionAssignment decode_partition(std::uint64_t code, std::size_t n) {
  PartitionAssignment partition;
  for (std::size_t i = 0; i < n; ++i, code /= 3) {
    switch (code % 3) {
      case 0: partition.aggressive.push_back(i); break;
      case 1: partition.conservative.push_back(i); break;
      default: partition.passive.push_back(i); break;
    }
  }
  return partition;
}

bool preferred(const Candidate& a, const Candidate& b) {
  constexpr double kTieTol = 1e-12;
  if (a.total > b.total + kTieTol) return true;
  if (b.total > a.total + kTieTol) return false;
  return std::tie(a.partition.aggressive, a.partition.conservative) <
         std::tie(b.partition.aggressive, b.partition.conservative);
}

}  // namespace

ModifiedSchedule algorithm2_schedule(const SystemConfig& config,
                                     const ModifiedSearchOptions& options) {
  config.validate();
  const std::size_t n = config.size();
  const auto caps = energy_caps(config).q_cap;

  ModifiedSchedule result;
  if (n == 1) {
    result.partition.aggressive = {0};
    result.profile = StrategyProfile::modified({1.0}, {caps[0]});
    result.total_throughput = caps[0];
    result.single_user_fallback = true;
    return result;
  }
  if (n > kModifiedSearchMaxUsers && !options.allow_large_n)
    throw GuardError(fmt::format(
        "partition search over {} users exceeds the limit of {} (set the guard override)", n,
        kModifiedSearchMaxUsers));

  std::uint64_t codes = 1;
  for (std::size_t i = 0; i < n; ++i) codes *= 3;

  // Fixed chunking keeps the reduction independent of the thread count.
  constexpr std::uint64_t kChunks = 64;
  const std::uint64_t chunk_size = (codes + kChunks - 1) / kChunks;
  std::vector<std::optional<Candidate>> best(kChunks);
  std::vector<std::size_t> failures(kChunks, 0);

  parallel_for(kChunks, options.threads, [&](std::size_t chunk) {
    const std::uint64_t begin = chunk * chunk_size;
    const std::uint64_t end = std::min(codes, begin + chunk_size);
    for (std::uint64_t code = begin; code < end; ++code) {
      Candidate c{decode_partition(code, n), {}, 0.0};
      if (c.partition.aggressive.empty() || c.partition.conservative.empty()) continue;
      std::vector<double> pinned(n, 0.0);
      std::vector<bool> free(n, false);
      for (std::size_t i : c.partition.aggressive) pinned[i] = caps[i];
      for (std::size_t k : c.partition.conservative) free[k] = true;
      try {
        c.q = solve_backoff_fixed_point(config, std::move(pinned), free, options.fixed_point);
      } catch (const SolverError&) {
        ++failures[chunk];
        continue;
      }
      std::vector<double> backoff(n, 0.0);
      for (std::size_t i : c.partition.aggressive) backoff[i] = 1.0;
      c.total = total_throughput(StrategyProfile::modified(std::move(backoff), c.q), config);
      if (!best[chunk] || preferred(c, *best[chunk])) best[chunk] = std::move(c);
    }
  });

  std::optional<Candidate> winner;
  for (std::size_t chunk = 0; chunk < kChunks; ++chunk) {
    result.skipped_candidates += failures[chunk];
    if (best[chunk] && (!winner || preferred(*best[chunk], *winner))) winner = best[chunk];
  }
  if (!winner)
    throw SolverError("no admissible partition converged", std::numeric_limits<double>::quiet_NaN());

  std::vector<double> backoff(n, 0.0);
  for (std::size_t i : winner->partition.aggressive) backoff[i] = 1.0;
  result.partition = std::move(winner->partition);
  result.profile = StrategyProfile::modified(std::move(backoff), std::move(winner->q));
  result.total_throughput = winner->total;
  return result;
}

const char* to_string(OracleBranch branch) noexcept {
  switch (branch) {
    case OracleBranch::Subset: return "subset";
    case OracleBranch::Grid: return "grid";
    case OracleBranch::Sample: return "sample";
  }
  return "unknown";
}

OracleResult grid_oracle_original(const SystemConfig& config, double step, std::size_t samples,
                                  std::uint64_t seed) {
  config.validate();
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError(fmt::format("oracle step {} not in (0, 1]", step));
  const std::size_t n = config.size();
  if (n > kOracleMaxUsers)
    throw GuardError(fmt::format("oracle enumeration over {} users exceeds {}", n, kOracleMaxUsers));
  const auto caps = energy_caps(config).q_cap;

  OracleResult best;
  best.q.assign(n, 0.0);
  best.total_throughput = reduced_total(best.q, config);
  auto offer = [&](const std::vector<double>& q, OracleBranch source) {
    const double total = reduced_total(q, config);
    if (total > best.total_throughput) best = {q, total, source};
  };

  std::vector<double> q(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) q[i] = (mask >> i) & 1U ? caps[i] : 0.0;
    offer(q, OracleBranch::Subset);
  }

  std::vector<double> levels;
  for (std::size_t k = 0; k * step < 1.0 - 1e-12; ++k) levels.push_back(k * step);
  levels.push_back(1.0);
  double points = 1.0;
  for (std::size_t i = 0; i < n; ++i) points *= static_cast<double>(levels.size());
  if (points <= static_cast<double>(kOracleMaxGridPoints)) {
    std::vector<std::size_t> digit(n, 0);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) q[i] = levels[digit[i]] * caps[i];
      offer(q, OracleBranch::Grid);
      std::size_t i = 0;
      while (i < n && ++digit[i] == levels.size()) digit[i++] = 0;
      if (i == n) break;
    }
  }

  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < n; ++i)
      q[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 * caps[i];
    offer(q, OracleBranch::Sample);
  }
  return best;
}

}  // namespace esaloha
