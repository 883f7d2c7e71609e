#pragma once

// Non-cooperative games over the access controls: the original game with
// its unique equilibrium, and the backoff game with best responses,
// dynamics, equilibrium enumeration and price-of-anarchy style metrics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "esaloha/optimizers.hpp"
#include "esaloha/types.hpp"

namespace esaloha {

/// Every user transmits always and stays ON as long as its budget allows:
/// p = 1, q_i = min(e_i / (c1 + c2), 1). No user's choice depends on others.
StrategyProfile nep_original(const SystemConfig& config);

/// Ratio optimum / equilibrium total throughput. 1 when both are zero,
/// +inf when only the equilibrium total is zero.
double throughput_ratio(double benchmark_total, double scheme_total) noexcept;

/// algorithm1_schedule total over nep_original total.
double price_of_anarchy_original(const SystemConfig& config);

struct BestResponse {
  double backoff = 0.0;
  double on_probability = 0.0;
  bool indifferent = false;  ///< both backoff choices give the same payoff
};

/// Best response of `user` in the backoff game, others held fixed. With
///   idle = prod_{j != i}(1 - q_j),  clear = prod_{j != i}(1 - b_j q_j),
/// the user persists (b = 1) iff (c1 + c2 idle) clear > (c1 + c2) idle and
/// backs off otherwise, then spends its whole budget:
///   q = min(1, e / (c1 + c2 (b + (1 - b) idle))).
/// Ties and zero budgets resolve to b = 0.
BestResponse best_response_modified(std::size_t user, const StrategyProfile& profile,
                                    const SystemConfig& config);

/// True when (b_i, q_i) of `profile` is a best response for `user` within
/// `tol`. An indifferent user may hold either backoff; an OFF user may hold
/// any backoff.
bool is_best_response(std::size_t user, const StrategyProfile& profile,
                      const SystemConfig& config, double tol);

bool is_equilibrium(const StrategyProfile& profile, const SystemConfig& config, double tol);

/// Clears the backoff of users with q = 0, whose backoff has no effect.
StrategyProfile canonicalize_modified(StrategyProfile profile);

enum class DynamicsKind { Converged, Cycle, MaxRounds };

const char* to_string(DynamicsKind kind) noexcept;

struct DynamicsOutcome {
  DynamicsKind kind = DynamicsKind::MaxRounds;
  std::size_t trajectory_length = 0;  ///< individual best-response updates applied
  StrategyProfile final_profile;
  std::size_t rounds = 0;
};

struct DynamicsOptions {
  std::size_t max_rounds = 1'000;
  double tol = 1e-10;
  /// Shuffle the update order every round from this seed; index order if unset.
  std::optional<std::uint64_t> order_seed;
};

/// Sequential best-response updates, one full pass over the users per round.
/// Converged when a round moves no (b, q) by more than tol; Cycle when a
/// profile seen at an earlier round boundary recurs after quantization at tol.
DynamicsOutcome best_response_dynamics(const SystemConfig& config,
                                       const StrategyProfile& initial,
                                       const DynamicsOptions& options = {});

struct Equilibrium {
  StrategyProfile profile;
  PerUserMetrics metrics;
  bool payoff_equivalent = false;  ///< same per-user payoffs as another listed profile
};

struct EnumerationResult {
  std::vector<Equilibrium> equilibria;  ///< sorted by total throughput, descending
  std::size_t skipped_patterns = 0;
};

inline constexpr std::size_t kEnumerationMaxUsers = 20;
inline constexpr double kEquilibriumDedupTol = 1e-6;

/// Tries every persist/back-off pattern: persisting users sit at their caps,
/// backing-off users are solved jointly, and the profile is kept iff every
/// user is at a best response within `tol`.
EnumerationResult enumerate_neps_modified(const SystemConfig& config, double tol,
                                          const FixedPointOptions& fixed_point = {},
                                          unsigned threads = 1);

struct EquilibriumReport {
  std::vector<Equilibrium> equilibria;
  double poa = 1.0;  ///< benchmark / worst equilibrium
  double pos = 1.0;  ///< benchmark / best equilibrium
  double mean_total_throughput = 0.0;
  double benchmark_total = 0.0;
  std::size_t skipped_patterns = 0;
};

enum class Scheme { Alg1, Fair, NepOriginal, ModifiedOpt, ModifiedGame };

const char* to_string(Scheme scheme) noexcept;

struct SchemeDegradation {
  Scheme scheme;
  double total_throughput;
  double degradation;  ///< benchmark / total
};

struct DegradationReport {
  ModifiedSchedule benchmark;
  EquilibriumReport modified_game;
  std::vector<SchemeDegradation> schemes;  ///< alg1, fair, nep_original, modified_opt
};

struct ReportOptions {
  ModifiedSearchOptions search;
  double equilibrium_tol = 1e-9;
};

/// Compares every scheme with the modified optimum (algorithm2_schedule).
/// The fair scheme falls back to a zero total when every budget is zero.
DegradationReport degradation_report(const SystemConfig& config,
                                     const ReportOptions& options = {});

}  // namespace esaloha
