#include "uclab/conjecture_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "uclab/entropy.hpp"
#include "uclab/errors.hpp"
#include "uclab/parallel.hpp"
#include "uclab/rng.hpp"
#include "uclab/text_format.hpp"

namespace uclab {

GapReport conjecture1_gap(const SubsetDistribution& d) {
  GapReport g;
  const SubsetDistribution u = union_distribution(d);
  g.h_union = dist_entropy(u);
  g.h_a = dist_entropy(d);
  g.kl = subset_kl(u, d);
  g.gap = std::isinf(g.kl) ? kInf : g.h_union + g.kl - g.h_a;
  const auto margs = marginals(d);
  g.marginal_max = margs.empty() ? 0.0 : *std::max_element(margs.begin(), margs.end());
  g.hypothesis_ok = g.marginal_max < 0.5 && g.h_a > 0.0;
  return g;
}

VerificationReport kl_identity_check(const SetFamily& f) {
  const auto closure = is_union_closed(f);
  if (!closure.closed) {
    const auto [a, b] = *closure.witness;
    throw UsageError("family is not union-closed: " + format_set(a) + " u " + format_set(b) + " = " +
                     format_set(a | b) + " is missing");
  }
  const SubsetDistribution d = uniform_distribution(f);
  const GapReport g = conjecture1_gap(d);
  const double log_size = std::log2(static_cast<double>(f.size()));
  const double residual = g.kl + g.h_union - log_size;

  VerificationReport r;
  r.subject = "D(A u B || A) + H(A u B) = log2 |F| for uniform A";
  r.add_check("|D + H(A u B) - log2 |F|| <= 1e-9", -std::abs(residual), 0.0, 1e-9);
  r.add_check("H(A) = log2 |F|", -std::abs(g.h_a - log_size), 0.0, 1e-12);
  r.details["family_size"] = f.size();
  r.details["n"] = f.n();
  r.details["kl"] = json_number(g.kl);
  r.details["h_union"] = g.h_union;
  r.details["h_a"] = g.h_a;
  r.details["log2_size"] = log_size;
  r.details["residual"] = json_number(residual);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Support is the closure of the generators plus the empty set; every member
// carries a logit.
struct SearchState {
  std::vector<Mask> generators;
  std::map<Mask, double> logits;
};

Mask random_mask(Rng& rng, int n) {
  const double density = rng.uniform(0.1, 0.6);
  Mask m = 0;
  for (int b = 0; b < n; ++b) {
    if (rng.bernoulli(density)) m |= Mask{1} << b;
  }
  if (m == 0) m = Mask{1} << rng.below(static_cast<std::uint64_t>(n));
  return m;
}

// Recloses the support; new members get a small random logit. Returns false
// if the closure exceeds the support budget.
bool reclose(SearchState& s, int n, std::size_t budget, Rng& rng) {
  std::vector<Mask> gens = s.generators;
  gens.push_back(0);
  const SetFamily closed = union_closure(SetFamily(n, gens));
  if (closed.size() > budget) return false;
  std::map<Mask, double> logits;
  for (Mask m : closed.members()) {
    auto it = s.logits.find(m);
    logits[m] = it != s.logits.end() ? it->second : -2.0 + rng.normal();
  }
  s.logits = std::move(logits);
  return true;
}

// Softmax weights, then mixing with the empty set until every marginal is at
// most the cap.
SubsetDistribution materialize(const SearchState& s, int n) {
  double top = -kInf;
  for (const auto& [m, z] : s.logits) top = std::max(top, z);
  std::vector<SubsetDistribution::Entry> pairs;
  pairs.reserve(s.logits.size());
  for (const auto& [m, z] : s.logits) pairs.push_back({m, std::exp(z - top)});
  SubsetDistribution d = make_distribution(n, pairs);
  const auto margs = marginals(d);
  const double peak = *std::max_element(margs.begin(), margs.end());
  if (peak <= kSearchMarginalCap) return d;
  const double keep = kSearchMarginalCap / peak;
  std::vector<SubsetDistribution::Entry> mixed{{0, 1.0 - keep}};
  for (const auto& e : d.entries()) mixed.push_back({e.mask, e.mass * keep});
  return make_distribution(n, mixed);
}

// Objective value; +inf marks states that cannot be "best".
double score(const GapReport& g) {
  if (!g.hypothesis_ok || std::isinf(g.gap)) return kInf;
  return g.gap;
}

struct RestartOutcome {
  double gap = kInf;
  GapReport report;
  SubsetDistribution witness;
  std::size_t rejected = 0;
};

RestartOutcome anneal(const SearchOptions& o, std::size_t restart) {
  Rng rng(Rng::derive(o.seed, restart));
  const int n = o.n;
  SearchState cur;
  // Start from a handful of generators whose closure fits the budget.
  for (int attempt = 0; attempt < 64; ++attempt) {
    SearchState trial;
    const std::size_t k = 1 + rng.below(4);
    for (std::size_t i = 0; i < k; ++i) trial.generators.push_back(random_mask(rng, n));
    if (reclose(trial, n, o.support_size, rng)) {
      cur = std::move(trial);
      break;
    }
  }
  if (cur.logits.empty()) {
    cur.generators = {Mask{1}};
    reclose(cur, n, std::max<std::size_t>(o.support_size, 2), rng);
  }
  for (auto& [m, z] : cur.logits) z = rng.normal();

  RestartOutcome out;
  SubsetDistribution cur_dist = materialize(cur, n);
  GapReport cur_report = conjecture1_gap(cur_dist);
  double cur_val = score(cur_report);
  if (cur_val < out.gap) out = {cur_val, cur_report, cur_dist, 0};

  constexpr double kT0 = 0.05;
  constexpr double kT1 = 1e-6;
  const double iters = static_cast<double>(std::max<std::size_t>(1, o.iters));
  for (std::size_t k = 0; k < o.iters; ++k) {
    const double temp = kT0 * std::pow(kT1 / kT0, static_cast<double>(k) / iters);
    const double step = std::max(1e-3, std::sqrt(temp / kT0));
    SearchState next = cur;
    const double move = rng.uniform();
    auto pick = [&](const SearchState& s) {
      auto it = s.logits.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng.below(s.logits.size())));
      return it->first;
    };
    if (move < 0.45 && next.logits.size() >= 2) {
      // Mass transfer between two members.
      const Mask a = pick(next);
      const Mask b = pick(next);
      const double delta = step * rng.normal();
      next.logits[a] += delta;
      next.logits[b] -= delta;
    } else if (move < 0.9) {
      next.logits[pick(next)] += step * rng.normal();
    } else if (move < 0.95 || next.generators.size() <= 1) {
      next.generators.push_back(random_mask(rng, n));
      if (!reclose(next, n, o.support_size, rng)) {
        ++out.rejected;
        continue;
      }
    } else {
      next.generators.erase(next.generators.begin() +
                            static_cast<std::ptrdiff_t>(rng.below(next.generators.size())));
      reclose(next, n, o.support_size, rng);
    }

    SubsetDistribution dist = materialize(next, n);
    GapReport report = conjecture1_gap(dist);
    const double val = score(report);
    if (!std::isfinite(val)) {
      ++out.rejected;
      continue;
    }
    const double delta = val - cur_val;
    if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temp)) {
      cur = std::move(next);
      cur_val = val;
      if (val < out.gap) {
        out.gap = val;
        out.report = report;
        out.witness = std::move(dist);
      }
    }
  }
  return out;
}

}  // namespace

SearchResult search_conjecture1(const SearchOptions& options) {
  if (options.n < 1 || options.n > 12) throw UsageError("search_conjecture1 supports 1 <= n <= 12");
  if (options.support_size < 2 || options.support_size > 512) {
    throw UsageError("search_conjecture1 supports 2 <= support_size <= 512");
  }
  if (options.restarts == 0) throw UsageError("search_conjecture1 needs restarts >= 1");

  auto chunks = map_chunks(options.restarts, resolve_jobs(options.jobs), [&](std::size_t begin, std::size_t end) {
    std::vector<RestartOutcome> outs;
    for (std::size_t r = begin; r < end; ++r) outs.push_back(anneal(options, r));
    return outs;
  });

  SearchResult result;
  result.best.gap = kInf;
  std::size_t r = 0;
  bool have = false;
  for (auto& chunk : chunks) {
    for (auto& out : chunk) {
      result.restart_gaps.push_back(out.gap);
      result.rejected += out.rejected;
      if (std::isfinite(out.gap) && (!have || out.gap < result.best.gap)) {
        have = true;
        result.best = out.report;
        result.witness = std::move(out.witness);
        result.best_restart = r;
      }
      ++r;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

Section4Report section4_counterexample() {
  // (X, C): C uniform on {0..3}, X uniform on {0, 2} or {1, 3} by C's parity.
  std::vector<JointDistribution::Cell> cells;
  for (Label c = 0; c < 4; ++c) {
    for (Label x = c % 2; x < 4; x += 2) cells.push_back({x, c, 0.125});
  }
  const JointDistribution xc(cells);

  // Two iid copies: X-side label 4x + x', Y-side label 4c + c'.
  std::vector<JointDistribution::Cell> pair_cells;
  for (const auto& a : xc.cells()) {
    for (const auto& b : xc.cells()) pair_cells.push_back({4 * a.x + b.x, 4 * a.y + b.y, a.mass * b.mass});
  }
  const JointDistribution pairs(pair_cells);

  // f acts on the X side, so map it through the transposed joint.
  const LabelMap f = [](Label xx) { return 2 * ((xx / 4) % 2) + (xx % 4) % 2; };
  const JointDistribution f_given_cc = transpose(map_condition(transpose(pairs), f));

  Section4Report r;
  r.h_x = entropy(xc.marginal_x());
  r.h_x_given_c = conditional_entropy(xc);
  r.h_f_xx = entropy(f_given_cc.marginal_x());
  r.h_f_given_cc = conditional_entropy(f_given_cc);
  return r;
}

Json to_json(const GapReport& g) {
  Json j;
  j["h_union"] = g.h_union;
  j["kl"] = json_number(g.kl);
  j["h_a"] = g.h_a;
  j["gap"] = json_number(g.gap);
  j["marginal_max"] = g.marginal_max;
  j["hypothesis_ok"] = g.hypothesis_ok;
  return j;
}

Json to_json(const Section4Report& r) {
  Json j;
  j["h_f_xx"] = r.h_f_xx;
  j["h_x"] = r.h_x;
  j["h_x_given_c"] = r.h_x_given_c;
  j["h_f_given_cc"] = r.h_f_given_cc;
  return j;
}

}  // namespace uclab
