#pragma once

// Brute-force reference computations. Deliberately naive: plain double loops
// over explicit tables, no transforms, no pooling. Nothing here calls into the
// library's algorithms.

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace oracle {

inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) / std::log(2.0) - (1 - p) * std::log(1 - p) / std::log(2.0);
}

inline double shannon(const std::vector<double>& m) {
  double h = 0.0;
  for (double v : m) {
    if (v > 0) h -= v * std::log2(v);
  }
  return h;
}

// Sparse law over masks.
using Law = std::map<std::uint32_t, double>;

inline double shannon(const Law& law) {
  double h = 0.0;
  for (const auto& [k, v] : law) {
    if (v > 0) h -= v * std::log2(v);
  }
  return h;
}

inline Law union_law(const Law& a) {
  Law u;
  for (const auto& [x, px] : a) {
    for (const auto& [y, py] : a) u[x | y] += px * py;
  }
  return u;
}

inline double kl(const Law& p, const Law& q) {
  double d = 0.0;
  for (const auto& [k, v] : p) {
    if (v <= 0) continue;
    auto it = q.find(k);
    if (it == q.end() || it->second <= 0) return INFINITY;
    d += v * std::log2(v / it->second);
  }
  return d;
}

inline double marginal(const Law& law, int i) {
  double m = 0.0;
  for (const auto& [k, v] : law) {
    if (k >> (i - 1) & 1u) m += v;
  }
  return m;
}

// H(A_i | A_<i) by grouping on the low bits.
inline double bit_entropy(const Law& law, int i) {
  std::map<std::uint32_t, std::pair<double, double>> groups;  // prefix -> (mass, mass with bit)
  const std::uint32_t low = (std::uint32_t{1} << (i - 1)) - 1;
  for (const auto& [k, v] : law) {
    auto& g = groups[k & low];
    g.first += v;
    if (k >> (i - 1) & 1u) g.second += v;
  }
  double h = 0.0;
  for (const auto& [c, g] : groups) {
    if (g.first > 0) h += g.first * h2(g.second / g.first);
  }
  return h;
}

inline bool closed(const std::set<std::uint32_t>& f) {
  for (auto a : f) {
    for (auto b : f) {
      if (!f.count(a | b)) return false;
    }
  }
  return true;
}

// Number of nonempty union-closed families on [n] by testing every subset of 2^[n].
inline std::size_t count_union_closed(int n) {
  const std::uint32_t sets = 1u << n;
  std::size_t count = 0;
  for (std::uint64_t code = 1; code < (std::uint64_t{1} << sets); ++code) {
    std::set<std::uint32_t> f;
    for (std::uint32_t s = 0; s < sets; ++s) {
      if (code >> s & 1u) f.insert(s);
    }
    if (closed(f)) ++count;
  }
  return count;
}

// sum_{c, c'} q_c q_c' H(p_c + p_c' - p_c p_c').
inline double pair_entropy(const std::vector<std::pair<double, double>>& qp) {
  double q_total = 0.0;
  for (auto [q, p] : qp) q_total += q;
  double h = 0.0;
  for (auto [q1, p1] : qp) {
    for (auto [q2, p2] : qp) h += (q1 / q_total) * (q2 / q_total) * h2(p1 + p2 - p1 * p2);
  }
  return h;
}

}  // namespace oracle
