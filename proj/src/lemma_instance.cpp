#include "uclab/lemma_instance.hpp"

#include <algorithm>
#include <map>

#include "uclab/errors.hpp"

namespace uclab {

LemmaInstance::LemmaInstance(std::vector<LemmaEntry> entries, double mu, double threshold)
    : entries_(std::move(entries)), mu_(mu), threshold_(threshold) {
  if (entries_.empty()) throw UsageError("lemma instance has no entries");
  long double total = 0.0L;
  for (auto& e : entries_) {
    if (e.weight < -kProbSlack) throw DomainError("negative history weight");
    e.weight = std::max(e.weight, 0.0);
    e.p = checked_prob(e.p);
    total += e.weight;
  }
  if (!(total > 0.0L)) throw UsageError("lemma instance has zero total weight");
  long double mean = 0.0L;
  for (auto& e : entries_) {
    e.weight = static_cast<double>(e.weight / total);
    mean += static_cast<long double>(e.weight) * e.p;
  }
  residual_ = static_cast<double>(total - 1.0L);
  mean_p_ = static_cast<double>(mean);
}

double LemmaInstance::conditional_entropy() const {
  long double h = 0.0L;
  for (const auto& e : entries_) h += static_cast<long double>(e.weight) * binary_entropy_unchecked(e.p);
  return static_cast<double>(h);
}

LemmaInstance LemmaInstance::with_parameters(double mu, double threshold) const {
  LemmaInstance copy = *this;
  copy.mu_ = mu;
  copy.threshold_ = threshold;
  return copy;
}

double pairwise_union_entropy(const LemmaInstance& inst) {
  std::map<double, long double> pooled;
  for (const auto& e : inst.entries()) pooled[e.p] += e.weight;
  std::vector<std::pair<double, double>> groups;
  groups.reserve(pooled.size());
  for (const auto& [p, w] : pooled) groups.emplace_back(p, static_cast<double>(w));

  long double diag = 0.0L;
  long double off = 0.0L;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto [pi, wi] = groups[i];
    diag += static_cast<long double>(wi) * wi * binary_entropy_unchecked(pi + pi - pi * pi);
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      const auto [pj, wj] = groups[j];
      off += static_cast<long double>(wi) * wj * binary_entropy_unchecked(pi + pj - pi * pj);
    }
  }
  return static_cast<double>(diag + 2.0L * off);
}

}  // namespace uclab
