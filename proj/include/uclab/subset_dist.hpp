#pragma once

// Probability distributions over subsets of [n], encoded as bitmasks where
// bit i-1 holds the indicator of element i.

#include <cstdint>
#include <utility>
#include <vector>

#include "uclab/entropy.hpp"
#include "uclab/lemma_instance.hpp"
#include "uclab/report.hpp"

namespace uclab {

using Mask = std::uint32_t;

inline constexpr int kMaxDenseBits = 24;
inline constexpr int kMaxSparseBits = 32;
inline constexpr std::size_t kMaxSparseSupport = 100000;

/// Mask with the low n bits set, i.e. the ground set [n].
constexpr Mask full_mask(int n) noexcept {
  return n >= 32 ? ~Mask{0} : static_cast<Mask>((std::uint64_t{1} << n) - 1);
}

enum class Representation { kDense, kSparse };

class SubsetDistribution {
 public:
  struct Entry {
    Mask mask;
    double mass;
  };

  SubsetDistribution() = default;

  int n() const noexcept { return n_; }
  /// Support in ascending mask order; every mass is positive.
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t support_size() const noexcept { return entries_.size(); }
  Representation representation() const noexcept { return representation_; }
  /// Total input mass minus 1, before renormalization.
  double residual() const noexcept { return residual_; }

  double mass_of(Mask mask) const noexcept;

  /// Full 2^n table. Requires n <= kMaxDenseBits.
  std::vector<double> dense_table() const;

  /// Builds from a 2^n table, dropping zero cells. No renormalization.
  static SubsetDistribution from_dense(int n, const std::vector<double>& table);

  friend SubsetDistribution make_distribution(int n, const std::vector<Entry>& pairs);

 private:
  int n_ = 0;
  std::vector<Entry> entries_;
  Representation representation_ = Representation::kSparse;
  double residual_ = 0.0;
};

/// Validates masks against n, merges duplicates by summation and renormalizes.
/// Throws UsageError for bad n, masks out of range or zero total mass, and
/// DomainError for negative masses beyond kProbSlack.
SubsetDistribution make_distribution(int n, const std::vector<SubsetDistribution::Entry>& pairs);

/// Every element present independently with probability p.
SubsetDistribution product_bernoulli(int n, double p);

/// [n] with probability p, the empty set otherwise.
SubsetDistribution two_point(int n, double p);

/// Element 1 present with probability p; given it, elements 2..n are iid with
/// probability q. Without element 1 the set is empty.
SubsetDistribution gated_product(int n, double p, double q);

/// Law of A u B for A, B iid from d. Picks the lattice transform when the
/// pairwise route would cost more than 2^n * n, otherwise sums pairs.
SubsetDistribution union_distribution(const SubsetDistribution& d);

/// Zeta transform, pointwise square, Moebius inversion. O(2^n n).
SubsetDistribution union_distribution_dense(const SubsetDistribution& d);

/// Accumulates all ordered pairs of the support. O(m^2).
SubsetDistribution union_distribution_sparse(const SubsetDistribution& d);

/// Pr[i in A] for 1-based element i.
double marginal(const SubsetDistribution& d, int i);

/// All n marginals, element 1 first.
std::vector<double> marginals(const SubsetDistribution& d);

double dist_entropy(const SubsetDistribution& d);

/// D(p || q) over the common label space 2^[n]; kInf if p escapes q's support.
/// H((A u B)_1) + H((A u B)_{>1} | A_1, B_1): union entropy once the first bit
/// of each sample is revealed. A lower bound on H(A u B). O(m^2).
double union_entropy_given_first_bits(const SubsetDistribution& d);

double subset_kl(const SubsetDistribution& p, const SubsetDistribution& q);

/// H(A_i | A_<i) for one bit together with the history instance behind it.
struct BitStep {
  int bit = 0;  // 1-based
  double h_bit = 0.0;
  LemmaInstance instance;
};

struct BitChainDecomposition {
  std::vector<BitStep> per_bit;

  double total() const;
};

/// Reveals bits 1..n in order. For each realized prefix c of the lower bits,
/// weight Pr[c] and p_c = Pr[A_i = 1 | A_<i = c].
BitChainDecomposition bit_chain(const SubsetDistribution& d, double mu = kDefaultMu,
                                double threshold = kDefaultThreshold);

/// Checks H(A u B) >= ratio H(A) together with the per-bit chain
///   H((AuB)_i | (AuB)_<i) >= H((AuB)_i | A_<i, B_<i) >= ratio H(A_i | A_<i).
/// The first link holds unconditionally; the rest only under marginals <= mu.
VerificationReport check_theorem1(const SubsetDistribution& d, double ratio = kDefaultRatio,
                                  double mu = kDefaultMu);

/// Seeded generator for property tests: exponential weights over `support`
/// random masks of varying density, then mixed with the empty set until every
/// marginal is at most mu. mu >= 1 skips the mixing.
SubsetDistribution random_distribution(int n, std::size_t support, double mu, std::uint64_t seed);

Json to_json(const SubsetDistribution& d);
Json to_json(const BitChainDecomposition& chain);

}  // namespace uclab
