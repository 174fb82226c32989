#pragma once

#include <vector>

#include "uclab/entropy.hpp"

namespace uclab {

/// One history c: its probability q_c and the conditional bit probability p_c.
struct LemmaEntry {
  double weight = 0.0;  // q_c
  double p = 0.0;       // p_c = Pr[X = 1 | C = c]
};

/// A weighted list {(q_c, p_c)} describing a bit X drawn after a history C.
/// Weights are renormalized on construction; p values are validated.
class LemmaInstance {
 public:
  LemmaInstance() = default;
  explicit LemmaInstance(std::vector<LemmaEntry> entries, double mu = kDefaultMu,
                         double threshold = kDefaultThreshold);

  const std::vector<LemmaEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  double mu() const noexcept { return mu_; }
  double threshold() const noexcept { return threshold_; }
  double residual() const noexcept { return residual_; }

  /// E[X] = sum q_c p_c.
  double mean_p() const noexcept { return mean_p_; }
  bool hypothesis_ok() const noexcept { return mean_p_ <= mu_ + kProbSlack; }

  /// H(X | C) = sum q_c H(p_c).
  double conditional_entropy() const;

  LemmaInstance with_parameters(double mu, double threshold) const;

 private:
  std::vector<LemmaEntry> entries_;
  double mu_ = kDefaultMu;
  double threshold_ = kDefaultThreshold;
  double residual_ = 0.0;
  double mean_p_ = 0.0;
};

/// H(X u X' | C, C') = sum_{c,c'} q_c q_c' H(p_c + p_c' - p_c p_c').
/// Entries with identical p are pooled first, so instances with few distinct
/// p values stay cheap regardless of their length.
double pairwise_union_entropy(const LemmaInstance& inst);

}  // namespace uclab
