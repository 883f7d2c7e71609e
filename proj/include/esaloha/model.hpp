#pragma once

// Analytic mean throughput and mean energy of the energy-constrained
// slotted-ALOHA model with ON/OFF frames.

#include <vector>

#include "esaloha/types.hpp"

namespace esaloha {

inline constexpr double kDefaultFeasibilityTol = 1e-9;

/// T_i = p_i q_i prod_{j != i} (1 - p_j q_j).
std::vector<double> mean_throughput_original(const StrategyProfile& profile,
                                             const SystemConfig& config);

/// E_i = q_i (c1 + c2 p_i).
std::vector<double> mean_energy_original(const StrategyProfile& profile,
                                         const SystemConfig& config);

/// Probe-then-backoff strategy. A user that is alone in its frame owns it;
/// otherwise it keeps transmitting with its backoff probability:
///   T_i = q_i [ (1 - b_i) prod_{j != i}(1 - q_j) + b_i prod_{j != i}(1 - b_j q_j) ].
std::vector<double> mean_throughput_modified(const StrategyProfile& profile,
                                             const SystemConfig& config);

///   E_i = q_i [ c1 + c2 ( b_i + (1 - b_i) prod_{j != i}(1 - q_j) ) ].
std::vector<double> mean_energy_modified(const StrategyProfile& profile,
                                         const SystemConfig& config);

/// Both vectors for the profile's own variant.
PerUserMetrics evaluate(const StrategyProfile& profile, const SystemConfig& config);

double total_throughput(const StrategyProfile& profile, const SystemConfig& config);

struct FeasibilityReport {
  bool feasible = true;
  std::vector<double> slack;  ///< budget minus mean energy, per user
};

FeasibilityReport is_feasible(const StrategyProfile& profile, const SystemConfig& config,
                              double tol = kDefaultFeasibilityTol);

/// q_cap_i = min(e_i / (c1 + c2), 1).
EnergyCaps energy_caps(const SystemConfig& config);

/// Canonical form of an original-variant profile: every user transmits in
/// every slot of an ON frame, with q'_i = p_i q_i. Throughput is unchanged and
/// energy drops by exactly c1 q_i (1 - p_i) per user.
StrategyProfile project_lemma1(const StrategyProfile& profile);

/// User indices sorted by decreasing budget, stable on index for ties.
std::vector<std::size_t> decreasing_budget_order(const SystemConfig& config);

}  // namespace esaloha
