#pragma once

// KL-augmented entropy comparisons between A and A u B.

#include <cstdint>
#include <vector>

#include "uclab/families.hpp"
#include "uclab/report.hpp"
#include "uclab/subset_dist.hpp"

namespace uclab {

/// Marginal cap enforced by the search: strictly below 1/2.
inline constexpr double kSearchMarginalCap = 0.5 - 1e-6;

struct GapReport {
  double h_union = 0.0;
  double kl = 0.0;  // D(A u B || A), may be kInf
  double h_a = 0.0;
  double gap = 0.0;  // h_union + kl - h_a, kInf with kl
  double marginal_max = 0.0;
  /// All marginals < 1/2 and H(A) > 0.
  bool hypothesis_ok = false;
};

GapReport conjecture1_gap(const SubsetDistribution& d);

/// For the uniform distribution over a union-closed family, checks
/// |D(A u B || A) + H(A u B) - log2 |F|| <= 1e-9. Throws UsageError naming a
/// witness pair when f is not union-closed.
VerificationReport kl_identity_check(const SetFamily& f);

struct SearchOptions {
  int n = 4;
  std::size_t support_size = 32;
  std::uint64_t seed = 0;
  std::size_t iters = 2000;
  std::size_t restarts = 8;
  unsigned jobs = 1;
};

struct SearchResult {
  GapReport best;
  SubsetDistribution witness;
  std::size_t best_restart = 0;
  std::vector<double> restart_gaps;
  /// Number of evaluated states whose gap was infinite or whose hypothesis failed.
  std::size_t rejected = 0;
};

/// Annealing over distributions whose support is a union-closed family
/// containing the empty set (the only supports with finite KL), with all
/// marginals capped at kSearchMarginalCap and point masses rejected.
/// Minimizes the gap; a negative gap is reported, not treated as an error.
SearchResult search_conjecture1(const SearchOptions& options);

struct Section4Report {
  double h_f_xx = 0.0;        // H(f(X, X'))
  double h_x = 0.0;           // H(X)
  double h_x_given_c = 0.0;   // H(X | C)
  double h_f_given_cc = 0.0;  // H(f(X, X') | C, C')
};

/// X, C uniform on {0, 1, 2, 3}; X | C uniform on the values of C's parity;
/// f(x, x') = (x mod 2, x' mod 2).
Section4Report section4_counterexample();

Json to_json(const GapReport& g);
Json to_json(const Section4Report& r);

}  // namespace uclab
