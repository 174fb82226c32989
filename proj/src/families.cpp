#include "uclab/families.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "uclab/errors.hpp"
#include "uclab/parallel.hpp"
#include "uclab/rng.hpp"
#include "uclab/text_format.hpp"

namespace uclab {

namespace {

// Membership set over 2^n, dense when small enough.
class MaskSet {
 public:
  explicit MaskSet(int n) {
    if (n <= kMaxRandomFamilyBits) dense_.assign(std::size_t{1} << n, 0);
  }
  bool contains(Mask m) const { return dense_.empty() ? sparse_.count(m) > 0 : dense_[m] != 0; }
  // Returns true if newly inserted.
  bool insert(Mask m) {
    if (dense_.empty()) return sparse_.insert(m).second;
    if (dense_[m]) return false;
    dense_[m] = 1;
    return true;
  }

 private:
  std::vector<char> dense_;
  std::unordered_set<Mask> sparse_;
};

void check_enumerable(int n) {
  if (n < 1) throw UsageError("n must be at least 1");
  if (n > kMaxEnumerateBits) {
    throw CapabilityError("exhaustive enumeration supports n <= " + std::to_string(kMaxEnumerateBits) +
                          "; use random_union_closed for larger n");
  }
}

// Families on n <= 4 as bitsets over the 2^n possible members.
using FamilyCode = std::uint32_t;

bool code_is_closed(FamilyCode code, int sets) {
  for (int s = 0; s < sets; ++s) {
    if (!(code >> s & 1u)) continue;
    for (int t = s + 1; t < sets; ++t) {
      if ((code >> t & 1u) && !(code >> (s | t) & 1u)) return false;
    }
  }
  return true;
}

SetFamily decode(FamilyCode code, int n) {
  std::vector<Mask> members;
  for (int s = 0; s < (1 << n); ++s) {
    if (code >> s & 1u) members.push_back(static_cast<Mask>(s));
  }
  return SetFamily(n, std::move(members));
}

FamilyCode encode(const SetFamily& f) {
  FamilyCode code = 0;
  for (Mask m : f.members()) code |= FamilyCode{1} << m;
  return code;
}

}  // namespace

SetFamily::SetFamily(int n, std::vector<Mask> members) : n_(n), members_(std::move(members)) {
  if (n < 1 || n > kMaxSparseBits) throw UsageError("family ground set size out of range");
  if (members_.empty()) throw UsageError("a family needs at least one member");
  const Mask full = full_mask(n);
  for (Mask m : members_) {
    if ((m & ~full) != 0) throw UsageError("family member outside [" + std::to_string(n) + "]");
  }
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool SetFamily::contains(Mask m) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), m);
}

bool canonical_less(const SetFamily& a, const SetFamily& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.members() < b.members();
}

SetFamily power_set(int n) {
  if (n < 1 || n > kMaxDenseBits) throw UsageError("power_set: n out of range");
  std::vector<Mask> all(std::size_t{1} << n);
  for (std::size_t s = 0; s < all.size(); ++s) all[s] = static_cast<Mask>(s);
  return SetFamily(n, std::move(all));
}

ClosureCheck is_union_closed(const SetFamily& f) {
  const auto& m = f.members();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (!f.contains(m[i] | m[j])) return {false, std::make_pair(m[i], m[j])};
    }
  }
  return {};
}

SetFamily union_closure(const SetFamily& generators) {
  MaskSet seen(generators.n());
  std::vector<Mask> members;
  for (Mask g : generators.members()) {
    if (seen.insert(g)) members.push_back(g);
  }
  // Every pair (j <= i) is combined once member i is reached.
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const Mask u = members[i] | members[j];
      if (seen.insert(u)) members.push_back(u);
    }
  }
  return SetFamily(generators.n(), std::move(members));
}

SetFamily family_self_union(const SetFamily& f) {
  MaskSet seen(f.n());
  std::vector<Mask> out;
  const auto& m = f.members();
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i; j < m.size(); ++j) {
      const Mask u = m[i] | m[j];
      if (seen.insert(u)) out.push_back(u);
    }
  }
  return SetFamily(f.n(), std::move(out));
}

FrequencyProfile frequency_profile(const SetFamily& f) {
  FrequencyProfile p;
  p.counts.assign(static_cast<std::size_t>(f.n()), 0);
  for (Mask m : f.members()) {
    for (int i = 0; i < f.n(); ++i) {
      if (m >> i & 1u) ++p.counts[i];
    }
  }
  const double total = static_cast<double>(f.size());
  p.fractions.reserve(p.counts.size());
  p.max_fraction = -1.0;
  for (std::size_t i = 0; i < p.counts.size(); ++i) {
    const double frac = static_cast<double>(p.counts[i]) / total;
    p.fractions.push_back(frac);
    if (frac > p.max_fraction) {
      p.max_fraction = frac;
      p.argmax = static_cast<int>(i) + 1;
    }
  }
  return p;
}

std::vector<SetFamily> enumerate_union_closed(int n) {
  check_enumerable(n);
  const int sets = 1 << n;
  std::vector<char> visited(std::size_t{1} << sets, 0);
  std::vector<SetFamily> out;
  std::vector<SetFamily> frontier;
  for (int s = 0; s < sets; ++s) {
    SetFamily single(n, {static_cast<Mask>(s)});
    visited[encode(single)] = 1;
    frontier.push_back(single);
  }
  while (!frontier.empty()) {
    SetFamily f = std::move(frontier.back());
    frontier.pop_back();
    for (int s = 0; s < sets; ++s) {
      if (f.contains(static_cast<Mask>(s))) continue;
      std::vector<Mask> grown = f.members();
      grown.push_back(static_cast<Mask>(s));
      SetFamily next = union_closure(SetFamily(n, std::move(grown)));
      const FamilyCode code = encode(next);
      if (!visited[code]) {
        visited[code] = 1;
        frontier.push_back(std::move(next));
      }
    }
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<SetFamily> enumerate_union_closed_filter(int n, unsigned jobs) {
  check_enumerable(n);
  const int sets = 1 << n;
  const std::uint64_t candidates = (std::uint64_t{1} << sets) - 1;
  auto chunks = map_chunks(static_cast<std::size_t>(candidates), resolve_jobs(jobs),
                           [&](std::size_t begin, std::size_t end) {
                             std::vector<FamilyCode> closed;
                             for (std::size_t k = begin; k < end; ++k) {
                               const auto code = static_cast<FamilyCode>(k + 1);
                               if (code_is_closed(code, sets)) closed.push_back(code);
                             }
                             return closed;
                           });
  std::vector<SetFamily> out;
  for (const auto& chunk : chunks) {
    for (FamilyCode code : chunk) out.push_back(decode(code, n));
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

SetFamily random_union_closed(int n, std::size_t k, std::uint64_t seed) {
  if (n < 1 || n > kMaxRandomFamilyBits) {
    throw UsageError("random_union_closed supports 1 <= n <= " + std::to_string(kMaxRandomFamilyBits));
  }
  if (k == 0) throw UsageError("random_union_closed needs at least one generator");
  Rng rng(seed);
  const std::uint64_t nonempty = (std::uint64_t{1} << n) - 1;
  std::vector<Mask> gens;
  gens.reserve(k);
  for (std::size_t i = 0; i < k; ++i) gens.push_back(static_cast<Mask>(1 + rng.below(nonempty)));
  return union_closure(SetFamily(n, std::move(gens)));
}

SubsetDistribution uniform_distribution(const SetFamily& f) {
  std::vector<SubsetDistribution::Entry> pairs;
  pairs.reserve(f.size());
  const double w = 1.0 / static_cast<double>(f.size());
  for (Mask m : f.members()) pairs.push_back({m, w});
  return make_distribution(f.n(), pairs);
}

VerificationReport frankl_brute(int n, double bound, unsigned jobs) {
  VerificationReport report;
  report.subject = "element frequency in union-closed families";
  const auto by_closure = enumerate_union_closed(n);
  const auto by_filter = enumerate_union_closed_filter(n, jobs);

  const bool agree = by_closure == by_filter;
  report.add_check("enumeration strategies agree", agree ? 1.0 : 0.0, 1.0, 0.0);

  double min_max = kInf;
  const SetFamily* worst = nullptr;
  std::size_t nontrivial = 0;
  for (const auto& f : by_closure) {
    if (f.is_empty_set_only()) continue;
    ++nontrivial;
    const double mf = frequency_profile(f).max_fraction;
    if (mf < min_max) {
      min_max = mf;
      worst = &f;
    }
  }
  if (worst != nullptr) report.add_check("min over families of max frequency >= bound", min_max, bound, 0.0);

  report.details["n"] = n;
  report.details["bound"] = bound;
  report.details["families"] = by_closure.size();
  report.details["families_filter"] = by_filter.size();
  report.details["nontrivial_families"] = nontrivial;
  report.details["min_max_fraction"] = json_number(min_max);
  report.details["worst_family"] = worst ? to_json(*worst) : Json(nullptr);
  return report;
}

Json to_json(const SetFamily& f) {
  Json j;
  j["n"] = f.n();
  j["size"] = f.size();
  Json members = Json::array();
  for (Mask m : f.members()) members.push_back(format_set(m));
  j["members"] = std::move(members);
  return j;
}

Json to_json(const FrequencyProfile& p) {
  Json j;
  j["counts"] = p.counts;
  j["fractions"] = p.fractions;
  j["argmax"] = p.argmax;
  j["max_fraction"] = p.max_fraction;
  return j;
}

}  // namespace uclab
