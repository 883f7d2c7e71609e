#include "esaloha/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/core.h>

#include "esaloha/error.hpp"

namespace esaloha {

void SystemConfig::validate() const {
  if (energy_budgets.empty()) throw ConfigError("energy_budgets must list at least one user");
  if (!std::isfinite(c1) || c1 <= 0.0) throw ConfigError(fmt::format("c1 must be > 0, got {}", c1));
  if (!std::isfinite(c2) || c2 < 0.0) throw ConfigError(fmt::format("c2 must be >= 0, got {}", c2));
  for (std::size_t i = 0; i < energy_budgets.size(); ++i) {
    const double e = energy_budgets[i];
    if (!std::isfinite(e) || e < 0.0)
      throw ConfigError(fmt::format("energy_budgets[{}] must be a finite value >= 0, got {}", i, e));
  }
}

SystemConfig make_config(std::vector<double> energy_budgets, double c1, double c2) {
  SystemConfig config{std::move(energy_budgets), c1, c2};
  config.validate();
  return config;
}

const char* to_string(Variant variant) noexcept {
  return variant == Variant::Original ? "original" : "modified";
}

StrategyProfile StrategyProfile::original(std::vector<double> p, std::vector<double> q) {
  return {Variant::Original, std::move(p), std::move(q)};
}

StrategyProfile StrategyProfile::modified(std::vector<double> backoff, std::vector<double> q) {
  return {Variant::Modified, std::move(backoff), std::move(q)};
}

void StrategyProfile::validate(std::size_t users) const {
  if (p.size() != users || q.size() != users)
    throw ConfigError(fmt::format("profile has {} access and {} ON probabilities for {} users",
                                  p.size(), q.size(), users));
  auto check = [](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!(v[i] >= 0.0 && v[i] <= 1.0))
        throw ConfigError(fmt::format("{}[{}] = {} is outside [0, 1]", name, i, v[i]));
  };
  check(p, "p");
  check(q, "q");
}

std::vector<double> leave_one_out_products(std::span<const double> factors) {
  const std::size_t n = factors.size();
  std::vector<double> out(n, 1.0);
  double prefix = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = prefix;
    prefix *= factors[i];
  }
  double suffix = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    out[i] *= suffix;
    suffix *= factors[i];
  }
  return out;
}

double sum(std::span<const double> values) noexcept {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

namespace {

void require(const StrategyProfile& profile, const SystemConfig& config, Variant variant) {
  if (profile.variant != variant)
    throw ConfigError(fmt::format("expected a {} profile, got {}", to_string(variant),
                                  to_string(profile.variant)));
  profile.validate(config.size());
}

std::vector<double> complement_products(const std::vector<double>& a, const std::vector<double>* b) {
  std::vector<double> factors(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) factors[j] = 1.0 - a[j] * (b ? (*b)[j] : 1.0);
  return leave_one_out_products(factors);
}

}  // namespace

std::vector<double> mean_throughput_original(const StrategyProfile& profile,
                                             const SystemConfig& config) {
  require(profile, config, Variant::Original);
  const auto silent = complement_products(profile.p, &profile.q);
  std::vector<double> t(profile.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = profile.p[i] * profile.q[i] * silent[i];
  return t;
}

std::vector<double> mean_energy_original(const StrategyProfile& profile,
                                         const SystemConfig& config) {
  require(profile, config, Variant::Original);
  std::vector<double> e(profile.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] = profile.q[i] * (config.c1 + config.c2 * profile.p[i]);
  return e;
}

std::vector<double> mean_throughput_modified(const StrategyProfile& profile,
                                             const SystemConfig& config) {
  require(profile, config, Variant::Modified);
  const auto& b = profile.p;
  const auto& q = profile.q;
  const auto idle = complement_products(q, nullptr);
  const auto clear = complement_products(b, &q);
  std::vector<double> t(q.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = q[i] * ((1.0 - b[i]) * idle[i] + b[i] * clear[i]);
  return t;
}

std::vector<double> mean_energy_modified(const StrategyProfile& profile,
                                         const SystemConfig& config) {
  require(profile, config, Variant::Modified);
  const auto& b = profile.p;
  const auto& q = profile.q;
  const auto idle = complement_products(q, nullptr);
  std::vector<double> e(q.size());
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] = q[i] * (config.c1 + config.c2 * (b[i] + (1.0 - b[i]) * idle[i]));
  return e;
}

PerUserMetrics evaluate(const StrategyProfile& profile, const SystemConfig& config) {
  PerUserMetrics m;
  if (profile.variant == Variant::Original) {
    m.throughput = mean_throughput_original(profile, config);
    m.energy = mean_energy_original(profile, config);
  } else {
    m.throughput = mean_throughput_modified(profile, config);
    m.energy = mean_energy_modified(profile, config);
  }
  m.total_throughput = sum(m.throughput);
  return m;
}

double total_throughput(const StrategyProfile& profile, const SystemConfig& config) {
  return sum(profile.variant == Variant::Original ? mean_throughput_original(profile, config)
                                                  : mean_throughput_modified(profile, config));
}

FeasibilityReport is_feasible(const StrategyProfile& profile, const SystemConfig& config,
                              double tol) {
  if (!(tol >= 0.0)) throw ConfigError("feasibility tolerance must be >= 0");
  const auto energy = profile.variant == Variant::Original
                          ? mean_energy_original(profile, config)
                          : mean_energy_modified(profile, config);
  FeasibilityReport report;
  report.slack.resize(energy.size());
  for (std::size_t i = 0; i < energy.size(); ++i) {
    report.slack[i] = config.energy_budgets[i] - energy[i];
    if (report.slack[i] < -tol) report.feasible = false;
  }
  return report;
}

EnergyCaps energy_caps(const SystemConfig& config) {
  config.validate();
  EnergyCaps caps;
  caps.q_cap.reserve(config.size());
  for (double e : config.energy_budgets) caps.q_cap.push_back(std::min(e / config.full_cost(), 1.0));
  return caps;
}

StrategyProfile project_lemma1(const StrategyProfile& profile) {
  if (profile.variant != Variant::Original)
    throw ConfigError("project_lemma1 applies to original-variant profiles");
  profile.validate(profile.size());
  std::vector<double> a(profile.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = profile.p[i] * profile.q[i];
  std::vector<double> always(a.size(), 1.0);
  return StrategyProfile::original(std::move(always), std::move(a));
}

std::vector<std::size_t> decreasing_budget_order(const SystemConfig& config) {
  std::vector<std::size_t> order(config.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return config.energy_budgets[a] > config.energy_budgets[b];
  });
  return order;
}

}  // namespace esaloha
