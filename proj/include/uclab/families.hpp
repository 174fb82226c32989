#pragma once

// Finite set families over [n] and the union-closed machinery around them.

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "uclab/report.hpp"
#include "uclab/subset_dist.hpp"

namespace uclab {

inline constexpr int kMaxEnumerateBits = 4;
inline constexpr int kMaxRandomFamilyBits = 20;

class SetFamily {
 public:
  SetFamily() = default;
  /// Sorts ascending and drops duplicates. Throws UsageError for an empty
  /// member list, bad n, or masks outside [n].
  SetFamily(int n, std::vector<Mask> members);

  int n() const noexcept { return n_; }
  const std::vector<Mask>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool contains(Mask m) const noexcept;

  /// {empty set}, which the frequency bound excludes.
  bool is_empty_set_only() const noexcept { return members_.size() == 1 && members_[0] == 0; }

  friend bool operator==(const SetFamily&, const SetFamily&) = default;

 private:
  int n_ = 0;
  std::vector<Mask> members_;
};

/// Ascending by size, then lexicographically by member list.
bool canonical_less(const SetFamily& a, const SetFamily& b);

SetFamily power_set(int n);

struct ClosureCheck {
  bool closed = true;
  /// A pair whose union is missing, when not closed.
  std::optional<std::pair<Mask, Mask>> witness;
};

ClosureCheck is_union_closed(const SetFamily& f);

/// Smallest union-closed family containing the generators.
SetFamily union_closure(const SetFamily& generators);

/// {A u B : A, B in F}.
SetFamily family_self_union(const SetFamily& f);

struct FrequencyProfile {
  std::vector<std::size_t> counts;  // element 1 first
  std::vector<double> fractions;
  int argmax = 1;  // 1-based, smallest index attaining the max
  double max_fraction = 0.0;
};

/// Denominators count every member, including the empty set.
FrequencyProfile frequency_profile(const SetFamily& f);

/// Every nonempty union-closed family on [n], n <= 4, in canonical order.
/// Generated by closing families under one added set at a time, starting from
/// single sets. Throws CapabilityError for larger n.
std::vector<SetFamily> enumerate_union_closed(int n);

/// Same contract, computed by testing all 2^(2^n) - 1 candidate families.
/// Used to cross-check enumerate_union_closed.
std::vector<SetFamily> enumerate_union_closed_filter(int n, unsigned jobs = 1);

/// Closure of k uniformly random nonempty masks; n <= 20.
SetFamily random_union_closed(int n, std::size_t k, std::uint64_t seed);

/// Mass 1/|F| on every member.
SubsetDistribution uniform_distribution(const SetFamily& f);

/// Exhaustive frequency sweep over all union-closed families on [n]: every
/// family other than {empty set} must have an element of frequency >= bound.
/// Also checks that both enumeration strategies agree.
VerificationReport frankl_brute(int n, double bound = kDefaultMu, unsigned jobs = 1);

Json to_json(const SetFamily& f);
Json to_json(const FrequencyProfile& p);

}  // namespace uclab
