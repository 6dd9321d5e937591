#pragma once

// Brute-force reference evaluations used only by the tests. They follow the
// textbook formulas literally (long double, no rescaling, no shared code with
// the library) so that agreement with the library is evidence of
// correctness rather than of shared bugs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline long double power(long double base, unsigned k) {
  long double out = 1.0L;
  for (unsigned i = 0; i < k; ++i) out *= base;
  return out;
}

inline long double decay(double t_current, double t_last, unsigned k, double tau) {
  const long double gap = (static_cast<long double>(t_current) - t_last) / tau;
  return std::exp(-power(gap, k));
}

struct Interaction {
  double t;
  double score;
};

// Decay-weighted mean plus bonus, clamped. No normalisation tricks.
inline long double direct_trust(const std::vector<Interaction>& history, double t_now,
                                unsigned k, double tau, double bonus) {
  long double num = 0.0L;
  long double den = 0.0L;
  for (const auto& h : history) {
    const long double g = decay(t_now, h.t, k, tau);
    num += g * h.score;
    den += g;
  }
  const long double v = num / den + bonus;
  return std::min(1.0L, std::max(0.0L, v));
}

inline long double edge_weight(std::uint64_t n_p, std::uint64_t n, double sl) {
  return static_cast<long double>(n_p) * sl / static_cast<long double>(n);
}

inline long double weighted_mean(const std::vector<double>& weights,
                                 const std::vector<double>& values) {
  long double num = 0.0L;
  long double den = 0.0L;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    num += static_cast<long double>(weights[i]) * values[i];
    den += weights[i];
  }
  return num / den;
}

// Sum of w_i * m_i with weights that already sum to one.
inline long double satisfaction(const std::vector<double>& weights,
                                const std::vector<double>& metrics) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < weights.size(); ++i)
    s += static_cast<long double>(weights[i]) * metrics[i];
  return s;
}

// Directed graph over nodes 0..n-1 as an adjacency matrix.
struct Digraph {
  std::size_t n = 0;
  std::vector<std::vector<bool>> adj;

  explicit Digraph(std::size_t nodes) : n(nodes), adj(nodes, std::vector<bool>(nodes, false)) {}
};

// Every simple path source -> target with 2..max_len edges, found by listing
// all ordered selections of distinct intermediate nodes and keeping those
// whose consecutive pairs are edges. No graph traversal involved.
inline std::set<std::vector<std::size_t>> simple_paths(const Digraph& g, std::size_t source,
                                                       std::size_t target,
                                                       std::size_t max_len) {
  std::vector<std::size_t> pool;
  for (std::size_t v = 0; v < g.n; ++v)
    if (v != source && v != target) pool.push_back(v);

  std::set<std::vector<std::size_t>> out;
  const std::size_t max_mid = std::min(max_len - 1, pool.size());
  // Enumerate subsets by bitmask, then every ordering of each subset.
  for (std::uint32_t mask = 1; mask < (1u << pool.size()); ++mask) {
    std::vector<std::size_t> mid;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask & (1u << i)) mid.push_back(pool[i]);
    if (mid.size() > max_mid) continue;
    std::sort(mid.begin(), mid.end());
    do {
      std::vector<std::size_t> path{source};
      path.insert(path.end(), mid.begin(), mid.end());
      path.push_back(target);
      bool ok = true;
      for (std::size_t i = 0; i + 1 < path.size() && ok; ++i) ok = g.adj[path[i]][path[i + 1]];
      if (ok) out.insert(path);
    } while (std::next_permutation(mid.begin(), mid.end()));
  }
  return out;
}

}  // namespace oracle
