#pragma once

// Numerical checks of the bit-level entropy inequality and the two-variable
// bounds it is assembled from.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "uclab/lemma_instance.hpp"
#include "uclab/report.hpp"

namespace uclab {

/// Lower bound on f over [0, t]^2 used for the low-probability block.
inline constexpr double kLowBlockBound = 1.4;
/// Factor guaranteed for the low/low block once Pr[C0] >= 0.9 (1.4 * 0.9).
inline constexpr double kLowLowFactor = 1.26;
/// Factor guaranteed for the mixed block (1.8 * 0.9).
inline constexpr double kMixedFactor = 1.62;

/// f(p, p') = 2 H(p + p' - p p') / (H(p) + H(p')). Undefined at (0, 0) and
/// wherever H(p) + H(p') vanishes; both throw DomainError.
double ratio_f(double p, double p2);

/// g(p) = H(0.9 p) / H(0.5 p) for p in (0, 1].
double ratio_g(double p);

struct GridPoint {
  double value = 0.0;
  double p = 0.0;
  double p2 = 0.0;
};

/// Smaller value wins; ties go to the lexicographically smaller (p, p2).
bool better_point(const GridPoint& a, const GridPoint& b);

struct LowBlockScan {
  double step = 0.0;
  std::size_t points = 0;
  std::size_t violations = 0;  // points with f < kLowBlockBound
  GridPoint grid_min;
  GridPoint refined_min;
  /// min over the grid of f - H(0.9 (p + p')) / H(0.5 (p + p')).
  double chained_min_margin = 0.0;
  std::size_t chained_violations = 0;  // margin < -1e-9
};

/// Scans f over [0, 0.1]^2 minus the origin with spacing at most `step`, then
/// refines the minimum by pattern search down to 1e-10 cells.
LowBlockScan scan_lemma_l1(double step, unsigned jobs = 1);
VerificationReport to_report(const LowBlockScan& scan);

struct ConcavityScan {
  double step = 0.0;
  std::size_t points = 0;
  std::size_t violations = 0;  // margin < -1e-12
  /// min of H(p + p' - p p') - (1 - p) H(p') and where it occurs.
  GridPoint min_margin;
  /// max |margin| over the edges p = 0 and p = 1.
  double edge_max_abs = 0.0;
};

/// Scans the margin over the full square [0, 1]^2.
ConcavityScan scan_lemma_l2(double step, unsigned jobs = 1);
VerificationReport to_report(const ConcavityScan& scan);

/// Split of an instance at the threshold into C0 = {p_c <= t} and C1 and the
/// three-block decomposition of H(X u X' | C, C').
struct DecompositionReport {
  double ratio = kDefaultRatio;
  double mu = kDefaultMu;
  double threshold = kDefaultThreshold;
  double mean_p = 0.0;
  bool hypothesis_ok = true;

  double pr_c0 = 0.0;
  double pr_c1 = 0.0;
  double term_00 = 0.0;  // both histories in C0
  double term_01 = 0.0;  // one in each, both orders
  double term_11 = 0.0;  // both in C1
  double h_x_given_c = 0.0;
  double h_x_given_c0 = 0.0;
  double h_x_given_c1 = 0.0;
  double lhs_total = 0.0;  // H(X u X' | C, C')
  double rhs_total = 0.0;  // ratio * H(X | C)

  double markov_margin = 0.0;         // mean_p / t - Pr[C1]
  double low_low_margin = 0.0;        // term_00 - 1.26 Pr[C0] H(X | C0)
  double mixed_margin = 0.0;          // term_01 - 1.62 Pr[C1] H(X | C1)
  double main_margin = 0.0;           // lhs_total - rhs_total
  double decomposition_residual = 0.0;  // lhs_total - (term_00 + term_01 + term_11)
  double split_residual = 0.0;        // H(X|C) - (Pr[C0] H(X|C0) + Pr[C1] H(X|C1))

  /// lhs_total / H(X | C), absent (NaN) when H(X | C) = 0.
  double observed_ratio() const;
};

DecompositionReport verify_instance(const LemmaInstance& inst, double ratio = kDefaultRatio);
VerificationReport to_report(const DecompositionReport& d);

enum class InstanceProfile { kSmooth, kSpiky, kBoundary };

InstanceProfile parse_profile(const std::string& name);
const char* to_string(InstanceProfile p) noexcept;

/// Seeded instance with mean_p <= mu. `smooth` spreads p_c over a small range,
/// `spiky` mixes near-zero p_c with rare p_c close to 0.99, `boundary` puts
/// p_c around the threshold. When the draw overshoots mu, smooth instances are
/// rescaled and the others get a p = 0 sink entry that brings mean_p to mu.
LemmaInstance random_instance(std::size_t size, double mu, std::uint64_t seed,
                              InstanceProfile profile, double threshold = kDefaultThreshold);

struct MinimizeOptions {
  std::size_t size = 16;
  double mu = kDefaultMu;
  std::uint64_t seed = 0;
  std::size_t iters = 10000;
  std::size_t restarts = 8;
  unsigned jobs = 1;
};

struct MinimizeResult {
  LemmaInstance best;
  double min_ratio = kInf;
  std::size_t best_restart = 0;
  std::vector<double> restart_ratios;
  /// Set when mu <= 0.01 and a ratio below 1.26 was found.
  bool critical = false;
};

/// Simulated annealing over (q, p) vectors, minimizing
/// H(X u X' | C, C') / H(X | C) subject to mean_p <= mu.
MinimizeResult adversarial_minimize(const MinimizeOptions& options);

/// H(2p - p^2) / H(p): the ratio of a single-history instance.
double single_point_ratio(double p);

struct GridRow {
  double p;
  double p2;
  double f;
};

/// f over [0, 0.1]^2 minus the origin, p-major, spacing at most `step`.
std::vector<GridRow> figure1_grid(double step);
GridPoint grid_minimum(const std::vector<GridRow>& rows);
/// Header "p,p_prime,f", LF endings, 17 significant digits.
void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows);

Json to_json(const LemmaInstance& inst);
Json to_json(const GridPoint& p);
Json to_json(const MinimizeResult& r);

}  // namespace uclab
