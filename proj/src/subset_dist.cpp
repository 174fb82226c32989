#include "uclab/subset_dist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "uclab/errors.hpp"
#include "uclab/rng.hpp"
#include "uclab/text_format.hpp"

namespace uclab {

namespace {

void check_n(int n, int limit) {
  if (n < 1 || n > limit) {
    throw UsageError("ground set size n=" + std::to_string(n) + " outside [1, " +
                     std::to_string(limit) + "]");
  }
}

// Sum-over-subsets in place: t[s] <- sum_{u subset of s} t[u].
template <typename T>
void zeta_transform(std::vector<T>& t, int n) {
  const std::size_t size = std::size_t{1} << n;
  for (int b = 0; b < n; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t s = 0; s < size; ++s) {
      if (s & bit) t[s] += t[s ^ bit];
    }
  }
}

template <typename T>
void moebius_transform(std::vector<T>& t, int n) {
  const std::size_t size = std::size_t{1} << n;
  for (int b = 0; b < n; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t s = 0; s < size; ++s) {
      if (s & bit) t[s] -= t[s ^ bit];
    }
  }
}

}  // namespace

double SubsetDistribution::mass_of(Mask mask) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), mask,
                             [](const Entry& e, Mask m) { return e.mask < m; });
  return (it != entries_.end() && it->mask == mask) ? it->mass : 0.0;
}

std::vector<double> SubsetDistribution::dense_table() const {
  if (n_ > kMaxDenseBits) {
    throw CapabilityError("dense table requested for n=" + std::to_string(n_) + " > " +
                          std::to_string(kMaxDenseBits));
  }
  std::vector<double> table(std::size_t{1} << n_, 0.0);
  for (const auto& e : entries_) table[e.mask] = e.mass;
  return table;
}

SubsetDistribution SubsetDistribution::from_dense(int n, const std::vector<double>& table) {
  check_n(n, kMaxDenseBits);
  if (table.size() != (std::size_t{1} << n)) throw UsageError("dense table has wrong size");
  SubsetDistribution d;
  d.n_ = n;
  d.representation_ = Representation::kDense;
  for (std::size_t s = 0; s < table.size(); ++s) {
    if (table[s] > 0.0) d.entries_.push_back({static_cast<Mask>(s), table[s]});
  }
  return d;
}

SubsetDistribution make_distribution(int n, const std::vector<SubsetDistribution::Entry>& pairs) {
  check_n(n, kMaxSparseBits);
  const Mask full = full_mask(n);
  std::vector<SubsetDistribution::Entry> sorted = pairs;
  for (const auto& e : sorted) {
    if ((e.mask & ~full) != 0) {
      throw UsageError("mask " + std::to_string(e.mask) + " has elements outside [" +
                       std::to_string(n) + "]");
    }
    if (std::isnan(e.mass) || e.mass < -kProbSlack) throw DomainError("negative or NaN mass");
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.mask < b.mask; });

  std::vector<SubsetDistribution::Entry> merged;
  std::vector<long double> sums;
  for (const auto& e : sorted) {
    if (!merged.empty() && merged.back().mask == e.mask) {
      sums.back() += std::max(e.mass, 0.0);
    } else {
      merged.push_back({e.mask, 0.0});
      sums.push_back(std::max(e.mass, 0.0));
    }
  }
  long double total = 0.0L;
  for (long double s : sums) total += s;
  if (!(total > 0.0L)) throw UsageError("distribution has zero total mass");

  SubsetDistribution d;
  d.n_ = n;
  d.residual_ = static_cast<double>(total - 1.0L);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const double mass = static_cast<double>(sums[i] / total);
    if (mass > 0.0) d.entries_.push_back({merged[i].mask, mass});
  }
  return d;
}

SubsetDistribution product_bernoulli(int n, double p) {
  check_n(n, kMaxDenseBits);
  p = checked_prob(p);
  std::vector<double> by_weight(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) by_weight[k] = std::pow(p, k) * std::pow(1.0 - p, n - k);
  std::vector<double> table(std::size_t{1} << n);
  for (std::size_t s = 0; s < table.size(); ++s) table[s] = by_weight[std::popcount(s)];
  return SubsetDistribution::from_dense(n, table);
}

SubsetDistribution two_point(int n, double p) {
  check_n(n, kMaxSparseBits);
  p = checked_prob(p);
  return make_distribution(n, {{0, 1.0 - p}, {full_mask(n), p}});
}

SubsetDistribution gated_product(int n, double p, double q) {
  if (n < 2) throw UsageError("gated_product needs n >= 2");
  check_n(n, kMaxDenseBits);
  p = checked_prob(p);
  q = checked_prob(q);
  const int rest = n - 1;
  std::vector<double> table(std::size_t{1} << n, 0.0);
  table[0] = 1.0 - p;
  for (std::size_t tail = 0; tail < (std::size_t{1} << rest); ++tail) {
    const int k = std::popcount(tail);
    table[(tail << 1) | 1u] = p * std::pow(q, k) * std::pow(1.0 - q, rest - k);
  }
  return SubsetDistribution::from_dense(n, table);
}

SubsetDistribution union_distribution_dense(const SubsetDistribution& d) {
  const int n = d.n();
  std::vector<double> cumulative = d.dense_table();
  std::vector<std::int64_t> pairs(cumulative.size(), 0);
  for (const auto& e : d.entries()) pairs[e.mask] = 1;

  // Pr[A u B subset of S] = Pr[A subset of S]^2; the integer copy counts
  // support pairs exactly so rounding cannot create or erase support.
  zeta_transform(cumulative, n);
  zeta_transform(pairs, n);
  for (auto& v : cumulative) v *= v;
  for (auto& v : pairs) v *= v;
  moebius_transform(cumulative, n);
  moebius_transform(pairs, n);

  for (std::size_t s = 0; s < cumulative.size(); ++s) {
    cumulative[s] = pairs[s] > 0 ? std::max(cumulative[s], std::numeric_limits<double>::denorm_min())
                                 : 0.0;
  }
  return SubsetDistribution::from_dense(n, cumulative);
}

SubsetDistribution union_distribution_sparse(const SubsetDistribution& d) {
  const auto& e = d.entries();
  std::unordered_map<Mask, long double> acc;
  acc.reserve(std::min<std::size_t>(e.size() * e.size(), std::size_t{1} << 22));
  for (std::size_t i = 0; i < e.size(); ++i) {
    const long double wi = e[i].mass;
    acc[e[i].mask] += wi * wi;
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      acc[e[i].mask | e[j].mask] += 2.0L * wi * e[j].mass;
    }
  }
  std::vector<SubsetDistribution::Entry> out;
  out.reserve(acc.size());
  for (const auto& [mask, mass] : acc) out.push_back({mask, static_cast<double>(mass)});
  return make_distribution(d.n(), out);
}

SubsetDistribution union_distribution(const SubsetDistribution& d) {
  const double m = static_cast<double>(d.support_size());
  if (d.n() <= kMaxDenseBits && m * m > std::ldexp(static_cast<double>(d.n()), d.n())) {
    return union_distribution_dense(d);
  }
  return union_distribution_sparse(d);
}

double marginal(const SubsetDistribution& d, int i) {
  if (i < 1 || i > d.n()) {
    throw UsageError("element index " + std::to_string(i) + " outside [1, " + std::to_string(d.n()) + "]");
  }
  const Mask bit = Mask{1} << (i - 1);
  long double sum = 0.0L;
  for (const auto& e : d.entries()) {
    if (e.mask & bit) sum += e.mass;
  }
  return static_cast<double>(sum);
}

std::vector<double> marginals(const SubsetDistribution& d) {
  std::vector<long double> sums(static_cast<std::size_t>(d.n()), 0.0L);
  for (const auto& e : d.entries()) {
    for (Mask m = e.mask; m != 0; m &= m - 1) sums[std::countr_zero(m)] += e.mass;
  }
  return {sums.begin(), sums.end()};
}

double dist_entropy(const SubsetDistribution& d) {
  std::vector<double> masses;
  masses.reserve(d.support_size());
  for (const auto& e : d.entries()) masses.push_back(e.mass);
  return entropy_of_masses(masses);
}

double union_entropy_given_first_bits(const SubsetDistribution& d) {
  // Key (A_1, B_1, A u B); (A_1, B_1) takes four values.
  std::unordered_map<std::uint64_t, long double> joint;
  long double first[4] = {0.0L, 0.0L, 0.0L, 0.0L};
  long double union_first = 0.0L;
  for (const auto& x : d.entries()) {
    for (const auto& y : d.entries()) {
      const unsigned ab = (x.mask & 1u) | ((y.mask & 1u) << 1);
      const long double m = static_cast<long double>(x.mass) * y.mass;
      joint[(static_cast<std::uint64_t>(ab) << 32) | (x.mask | y.mask)] += m;
      first[ab] += m;
      if (ab != 0) union_first += m;
    }
  }
  std::vector<double> jm, fm;
  jm.reserve(joint.size());
  for (const auto& [k, m] : joint) jm.push_back(static_cast<double>(m));
  for (long double m : first) fm.push_back(static_cast<double>(m));
  return binary_entropy_unchecked(static_cast<double>(union_first)) + entropy_of_masses(jm) -
         entropy_of_masses(fm);
}

double subset_kl(const SubsetDistribution& p, const SubsetDistribution& q) {
  if (p.n() != q.n()) throw UsageError("subset_kl: ground sets differ");
  const auto& pe = p.entries();
  const auto& qe = q.entries();
  long double d = 0.0L;
  std::size_t j = 0;
  for (const auto& e : pe) {
    while (j < qe.size() && qe[j].mask < e.mask) ++j;
    if (j == qe.size() || qe[j].mask != e.mask) return kInf;
    d += static_cast<long double>(e.mass) * std::log2(static_cast<long double>(e.mass) / qe[j].mass);
  }
  return static_cast<double>(d);
}

double BitChainDecomposition::total() const {
  long double s = 0.0L;
  for (const auto& step : per_bit) s += step.h_bit;
  return static_cast<double>(s);
}

BitChainDecomposition bit_chain(const SubsetDistribution& d, double mu, double threshold) {
  const auto& entries = d.entries();
  BitChainDecomposition chain;
  chain.per_bit.reserve(static_cast<std::size_t>(d.n()));

  struct Group {
    Mask prefix;
    long double mass;
    long double ones;
  };

  for (int i = 1; i <= d.n(); ++i) {
    const Mask prefix_mask = full_mask(i - 1);
    const Mask bit = Mask{1} << (i - 1);
    std::vector<Group> groups;

    const std::size_t prefix_space = std::size_t{1} << (i - 1);
    if (prefix_space <= 4 * entries.size() + 64) {
      std::vector<long double> mass(prefix_space, 0.0L);
      std::vector<long double> ones(prefix_space, 0.0L);
      for (const auto& e : entries) {
        const Mask c = e.mask & prefix_mask;
        mass[c] += e.mass;
        if (e.mask & bit) ones[c] += e.mass;
      }
      for (std::size_t c = 0; c < prefix_space; ++c) {
        if (mass[c] > 0.0L) groups.push_back({static_cast<Mask>(c), mass[c], ones[c]});
      }
    } else {
      std::unordered_map<Mask, std::size_t> index;
      for (const auto& e : entries) {
        const Mask c = e.mask & prefix_mask;
        auto [it, inserted] = index.try_emplace(c, groups.size());
        if (inserted) groups.push_back({c, 0.0L, 0.0L});
        Group& g = groups[it->second];
        g.mass += e.mass;
        if (e.mask & bit) g.ones += e.mass;
      }
      std::sort(groups.begin(), groups.end(),
                [](const Group& a, const Group& b) { return a.prefix < b.prefix; });
    }

    std::vector<LemmaEntry> inst;
    inst.reserve(groups.size());
    long double h = 0.0L;
    for (const auto& g : groups) {
      const double pc = std::clamp(static_cast<double>(g.ones / g.mass), 0.0, 1.0);
      h += g.mass * binary_entropy_unchecked(pc);
      inst.push_back({static_cast<double>(g.mass), pc});
    }
    chain.per_bit.push_back({i, static_cast<double>(h), LemmaInstance(std::move(inst), mu, threshold)});
  }
  return chain;
}

VerificationReport check_theorem1(const SubsetDistribution& d, double ratio, double mu) {
  constexpr double kTol = 1e-9;
  VerificationReport report;
  report.subject = "entropy growth under union";

  const auto margs = marginals(d);
  const double max_marginal = margs.empty() ? 0.0 : *std::max_element(margs.begin(), margs.end());
  report.hypothesis_ok = max_marginal <= mu + kProbSlack;

  const SubsetDistribution u = union_distribution(d);
  const auto chain_a = bit_chain(d, mu);
  const auto chain_u = bit_chain(u, mu);
  const double h_a = dist_entropy(d);
  const double h_u = dist_entropy(u);

  Json bits = Json::array();
  int worst_bit = 0;
  double worst_margin = kInf;
  for (std::size_t k = 0; k < chain_a.per_bit.size(); ++k) {
    const int i = chain_a.per_bit[k].bit;
    const double outer = chain_u.per_bit[k].h_bit;
    const double inner = pairwise_union_entropy(chain_a.per_bit[k].instance);
    const double rhs = ratio * chain_a.per_bit[k].h_bit;
    const std::string tag = "bit " + std::to_string(i);
    const auto& c1 = report.add_check(tag + ": outer >= inner", outer, inner, kTol);
    const auto& c2 = report.add_check(tag + ": inner >= ratio * H(A_i | A_<i)", inner, rhs, kTol, true);
    const double m = std::min(c1.margin, c2.margin);
    if (m < worst_margin) {
      worst_margin = m;
      worst_bit = i;
    }
    Json b;
    b["bit"] = i;
    b["h_bit"] = chain_a.per_bit[k].h_bit;
    b["lhs_outer"] = outer;
    b["lhs_inner"] = inner;
    b["rhs"] = rhs;
    b["histories"] = chain_a.per_bit[k].instance.size();
    b["mean_p"] = chain_a.per_bit[k].instance.mean_p();
    bits.push_back(std::move(b));
  }
  report.add_check("global: H(A u B) >= ratio * H(A)", h_u, ratio * h_a, kTol, true);

  report.details["n"] = d.n();
  report.details["support_size"] = d.support_size();
  report.details["ratio"] = ratio;
  report.details["mu"] = mu;
  report.details["max_marginal"] = max_marginal;
  report.details["h_a"] = h_a;
  report.details["h_union"] = h_u;
  report.details["observed_ratio"] = h_a > 0.0 ? Json(h_u / h_a) : Json(nullptr);
  report.details["worst_bit"] = worst_bit == 0 ? Json(nullptr) : Json(worst_bit);
  report.details["per_bit"] = std::move(bits);
  return report;
}

SubsetDistribution random_distribution(int n, std::size_t support, double mu, std::uint64_t seed) {
  check_n(n, kMaxSparseBits);
  if (support == 0) throw UsageError("random_distribution needs a nonempty support");
  Rng rng(seed);
  const double density = rng.uniform(0.05, 0.6);
  const Mask full = full_mask(n);
  std::vector<SubsetDistribution::Entry> pairs;
  pairs.reserve(support + 1);
  for (std::size_t k = 0; k < support; ++k) {
    Mask m = 0;
    if (rng.uniform() < 0.3) {
      // A contiguous block of elements.
      const int lo = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      const int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - lo)));
      m = (full_mask(len) << lo) & full;
    } else {
      for (int b = 0; b < n; ++b) {
        if (rng.bernoulli(density)) m |= Mask{1} << b;
      }
    }
    pairs.push_back({m, rng.exponential()});
  }
  SubsetDistribution base = make_distribution(n, pairs);
  if (mu >= 1.0) return base;

  const auto margs = marginals(base);
  const double top = *std::max_element(margs.begin(), margs.end());
  if (top <= mu) return base;
  std::vector<SubsetDistribution::Entry> mixed;
  const double keep = mu / top;
  mixed.push_back({0, 1.0 - keep});
  for (const auto& e : base.entries()) mixed.push_back({e.mask, e.mass * keep});
  return make_distribution(n, mixed);
}

Json to_json(const SubsetDistribution& d) {
  Json j;
  j["n"] = d.n();
  j["representation"] = d.representation() == Representation::kDense ? "dense" : "sparse";
  j["support_size"] = d.support_size();
  j["residual"] = d.residual();
  Json entries = Json::array();
  for (const auto& e : d.entries()) entries.push_back(Json::array({format_set(e.mask), e.mass}));
  j["entries"] = std::move(entries);
  return j;
}

Json to_json(const BitChainDecomposition& chain) {
  Json bits = Json::array();
  for (const auto& step : chain.per_bit) {
    Json b;
    b["bit"] = step.bit;
    b["h_bit"] = step.h_bit;
    b["histories"] = step.instance.size();
    b["mean_p"] = step.instance.mean_p();
    bits.push_back(std::move(b));
  }
  Json j;
  j["total"] = chain.total();
  j["per_bit"] = std::move(bits);
  return j;
}

}  // namespace uclab
