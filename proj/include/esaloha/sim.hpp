#pragma once

// Frame/slot Monte Carlo simulation of both access strategies.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "esaloha/types.hpp"

namespace esaloha {

struct SimParams {
  std::uint64_t frames = 100'000;
  std::uint32_t slots_per_frame = 100;
  std::uint64_t seed = 42;
  unsigned threads = 1;  ///< results are identical for every value

  void validate() const;
};

struct SimEstimate {
  std::vector<double> mean_throughput;  ///< successes per slot
  std::vector<double> mean_energy;      ///< energy units per frame
  std::vector<double> stderr_throughput;
  std::vector<double> stderr_energy;
  std::vector<std::uint64_t> frames_on;
  double mean_active_users = 0.0;  ///< users ON per frame
  double stderr_active_users = 0.0;

  friend bool operator==(const SimEstimate&, const SimEstimate&) = default;
};

/// Each frame every user is ON with probability q_i; each ON user transmits
/// in each slot with probability p_i; a slot succeeds iff exactly one user
/// transmits. An ON user pays c1 + c2 * (transmissions / slots) per frame.
SimEstimate simulate_original(const StrategyProfile& profile, const SystemConfig& config,
                              const SimParams& params);

/// Every ON user probes slot 1. A lone user keeps the whole frame; otherwise
/// the probe collides and each ON user transmits in slots 2..S with its
/// backoff probability. Energy is charged as in simulate_original.
SimEstimate simulate_modified(const StrategyProfile& profile, const SystemConfig& config,
                              const SimParams& params);

/// Dispatches on profile.variant.
SimEstimate simulate(const StrategyProfile& profile, const SystemConfig& config,
                     const SimParams& params);

/// Seed of the independent stream for one frame; a pure function of
/// (master seed, frame index).
std::uint64_t frame_stream_seed(std::uint64_t master_seed, std::uint64_t frame) noexcept;

}  // namespace esaloha
