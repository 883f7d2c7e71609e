#pragma once

// Test-only reference implementations. Deliberately naive: direct double
// loops over the users, no shared helpers with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace esaloha::oracle {

inline double others_product(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t skip) {
  double r = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (j != skip) r *= 1.0 - a[j] * b[j];
  return r;
}

inline std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

inline double total_original(const std::vector<double>& p, const std::vector<double>& q) {
  double t = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) t += p[i] * q[i] * others_product(p, q, i);
  return t;
}

inline std::vector<double> throughput_modified(const std::vector<double>& b,
                                               const std::vector<double>& q) {
  const auto one = ones(q.size());
  std::vector<double> t(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    t[i] = q[i] * ((1 - b[i]) * others_product(one, q, i) + b[i] * others_product(b, q, i));
  return t;
}

inline double total_modified(const std::vector<double>& b, const std::vector<double>& q) {
  double s = 0.0;
  for (double v : throughput_modified(b, q)) s += v;
  return s;
}

inline std::vector<double> caps(const std::vector<double>& e, double c1, double c2) {
  std::vector<double> c(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) c[i] = std::min(e[i] / (c1 + c2), 1.0);
  return c;
}

/// Best total over every 0/cap activation vector (p = 1).
inline double best_subset_total(const std::vector<double>& e, double c1, double c2) {
  const auto cap = caps(e, c1, c2);
  const std::size_t n = e.size();
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = (mask >> i) & 1U ? cap[i] : 0.0;
    best = std::max(best, total_original(ones(n), q));
  }
  return best;
}

/// Plain Gauss-Seidel on q_k = min(1, e_k / (c1 + c2 prod_{j != k}(1 - q_j))).
inline std::vector<double> backoff_fixed_point(const std::vector<double>& e, double c1, double c2,
                                               std::vector<double> q,
                                               const std::vector<bool>& free) {
  const auto one = ones(e.size());
  for (int sweep = 0; sweep < 200000; ++sweep) {
    double moved = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (!free[k]) continue;
      const double next = std::min(1.0, e[k] / (c1 + c2 * others_product(one, q, k)));
      moved = std::max(moved, std::abs(next - q[k]));
      q[k] = next;
    }
    if (moved < 1e-15) break;
  }
  return q;
}

/// Exhaustive aggressive/conservative/passive search; returns the best total.
inline double best_partition_total(const std::vector<double>& e, double c1, double c2) {
  const std::size_t n = e.size();
  const auto cap = caps(e, c1, c2);
  std::uint64_t codes = 1;
  for (std::size_t i = 0; i < n; ++i) codes *= 3;
  double best = 0.0;
  for (std::uint64_t code = 0; code < codes; ++code) {
    std::vector<double> b(n, 0.0), q(n, 0.0);
    std::vector<bool> free(n, false);
    bool has_a = false, has_c = false;
    std::uint64_t c = code;
    for (std::size_t i = 0; i < n; ++i, c /= 3) {
      if (c % 3 == 0) { b[i] = 1.0; q[i] = cap[i]; has_a = true; }
      if (c % 3 == 1) { free[i] = true; has_c = true; }
    }
    if (!has_a || !has_c) continue;
    q = backoff_fixed_point(e, c1, c2, q, free);
    best = std::max(best, total_modified(b, q));
  }
  return best;
}

/// Random budgets uniform in [0, hi).
inline std::vector<double> random_budgets(std::mt19937_64& rng, std::size_t n, double hi) {
  std::uniform_real_distribution<double> u(0.0, hi);
  std::vector<double> e(n);
  for (auto& v : e) v = u(rng);
  return e;
}

}  // namespace esaloha::oracle
