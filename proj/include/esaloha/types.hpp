#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace esaloha {

/// Network parameters shared by every solver: one mean per-frame energy
/// budget per user, the ON-state cost c1 and the full-frame transmission
/// cost c2 (both in energy units per frame).
struct SystemConfig {
  std::vector<double> energy_budgets;
  double c1 = 0.0;
  double c2 = 0.0;

  std::size_t size() const noexcept { return energy_budgets.size(); }
  double full_cost() const noexcept { return c1 + c2; }

  /// Throws ConfigError unless N >= 1, every budget >= 0, c1 > 0, c2 >= 0
  /// and all values are finite.
  void validate() const;
};

/// Validated constructor.
SystemConfig make_config(std::vector<double> energy_budgets, double c1, double c2);

enum class Variant {
  Original,  ///< p is the per-slot access probability
  Modified,  ///< p is the post-collision backoff probability
};

const char* to_string(Variant variant) noexcept;

/// Per-user access controls. `q` is the per-frame ON probability; the
/// meaning of `p` depends on `variant`.
struct StrategyProfile {
  Variant variant = Variant::Original;
  std::vector<double> p;
  std::vector<double> q;

  static StrategyProfile original(std::vector<double> p, std::vector<double> q);
  static StrategyProfile modified(std::vector<double> backoff, std::vector<double> q);

  std::size_t size() const noexcept { return q.size(); }

  /// Throws ConfigError on length mismatch with `users` or entries outside [0,1].
  void validate(std::size_t users) const;
};

struct PerUserMetrics {
  std::vector<double> throughput;  ///< successful slots per slot
  std::vector<double> energy;      ///< energy units per frame
  double total_throughput = 0.0;
};

struct EnergyCaps {
  std::vector<double> q_cap;
};

/// Returns, for each i, the product of all factors except factors[i].
/// Exact in the presence of zero factors.
std::vector<double> leave_one_out_products(std::span<const double> factors);

double sum(std::span<const double> values) noexcept;

}  // namespace esaloha
