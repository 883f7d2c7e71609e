#pragma once

// Social-optimum schedulers: greedy activation at the energy caps, the
// budget-proportional fair allocation, and the exhaustive
// aggressive/conservative/passive search for the backoff strategy.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "esaloha/types.hpp"

namespace esaloha {

struct ActivationResult {
  std::vector<std::size_t> active_set;  ///< in activation order
  StrategyProfile profile;              ///< original variant, p = 1
  double total_throughput = 0.0;
};

/// Throughput-optimal original-variant schedule. Users are visited in
/// decreasing budget order; a user is switched on at its cap iff the sum of
/// q/(1-q) over users already on is below 1. A user with cap 1 contributes
/// +inf and closes the medium. Zero-cap users are never activated.
ActivationResult algorithm1_schedule(const SystemConfig& config);

struct FairWeights {
  std::vector<double> w;

  /// Throws ConfigError unless every w_i >= 0 and the weights sum to 1
  /// within 1e-12.
  static FairWeights from(std::vector<double> w);
  /// w_i = e_i / sum_k e_k. Throws ConfigError when the budgets sum to zero.
  static FairWeights proportional_to_budget(const SystemConfig& config);
};

/// p = 1, q_i = min(w_i, q_cap_i). Default weights are budget-proportional.
StrategyProfile fair_allocation(const SystemConfig& config,
                                const std::optional<FairWeights>& weights = std::nullopt);

/// sum_i w_i log T_i; -inf as soon as some user has zero throughput.
double fair_utility(const StrategyProfile& profile, const FairWeights& weights,
                    const SystemConfig& config);

struct PartitionAssignment {
  std::vector<std::size_t> aggressive;
  std::vector<std::size_t> conservative;
  std::vector<std::size_t> passive;

  /// Throws ConfigError unless the three sets partition {0..users-1}.
  void validate(std::size_t users) const;
  friend bool operator==(const PartitionAssignment&, const PartitionAssignment&) = default;
};

struct FixedPointOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10'000;
  double damping = 0.5;  ///< weight of the new iterate
};

/// Solves q_k = min(1, e_k / (c1 + c2 prod_{j != k}(1 - q_j))) for the
/// conservative users of `partition` with aggressive users pinned at their
/// caps and passive users at 0. Returns the full q vector.
/// Throws SolverError (carrying the last residual) after max_iter sweeps.
std::vector<double> conservative_fixed_point(const PartitionAssignment& partition,
                                             const SystemConfig& config,
                                             const FixedPointOptions& options = {});

/// Same solve with an explicit pinned/free split: entries of `pinned_q` for
/// which `free[i]` is false are kept, the rest are solved for.
std::vector<double> solve_backoff_fixed_point(const SystemConfig& config,
                                              std::vector<double> pinned_q,
                                              const std::vector<bool>& free,
                                              const FixedPointOptions& options);

/// Largest residual max_k |q_k - min(1, e_k / (c1 + c2 prod_{j != k}(1 - q_j)))|
/// over the users flagged in `free`.
double backoff_fixed_point_residual(const SystemConfig& config, const std::vector<double>& q,
                                    const std::vector<bool>& free);

inline constexpr std::size_t kModifiedSearchMaxUsers = 14;

struct ModifiedSearchOptions {
  FixedPointOptions fixed_point;
  bool allow_large_n = false;  ///< lift the N <= 14 guard
  unsigned threads = 1;
};

struct ModifiedSchedule {
  PartitionAssignment partition;
  StrategyProfile profile;  ///< modified variant
  double total_throughput = 0.0;
  std::size_t skipped_candidates = 0;  ///< partitions whose fixed point failed
  bool single_user_fallback = false;   ///< N = 1: no conservative user exists
};

/// Exhaustive search over all (A, C, P) partitions with |A| >= 1, |C| >= 1.
/// Ties go to the lexicographically smallest aggressive set, then
/// conservative set. Throws GuardError for N > 14 unless allowed, and
/// SolverError when every candidate fails to converge.
ModifiedSchedule algorithm2_schedule(const SystemConfig& config,
                                     const ModifiedSearchOptions& options = {});

enum class OracleBranch { Subset, Grid, Sample };

const char* to_string(OracleBranch branch) noexcept;

struct OracleResult {
  std::vector<double> q;  ///< with p = 1
  double total_throughput = 0.0;
  OracleBranch source = OracleBranch::Subset;
};

inline constexpr std::size_t kOracleMaxUsers = 20;
inline constexpr std::size_t kOracleMaxGridPoints = 1'000'000;

/// Brute-force search of the p = 1 reduced problem: every 0/cap activation
/// vector, the lattice {0, step, 2 step, ..., 1} x cap per user when it has at
/// most 10^6 points, and `samples` uniform draws from the box [0, cap].
/// Throws GuardError for N > 20.
OracleResult grid_oracle_original(const SystemConfig& config, double step, std::size_t samples,
                                  std::uint64_t seed);

}  // namespace esaloha
