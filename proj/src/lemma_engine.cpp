#include "uclab/lemma_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include "uclab/errors.hpp"
#include "uclab/parallel.hpp"
#include "uclab/rng.hpp"
#include "uclab/text_format.hpp"

namespace uclab {

namespace {

constexpr double kLowBlockEdge = 0.1;
constexpr double kRefineCell = 1e-10;

double union_unchecked(double p, double p2) { return std::clamp(p + p2 - p * p2, 0.0, 1.0); }

// f without argument checks; caller guarantees (p, p2) != (0, 0).
double ratio_f_unchecked(double p, double p2) {
  return 2.0 * binary_entropy_unchecked(union_unchecked(p, p2)) /
         (binary_entropy_unchecked(p) + binary_entropy_unchecked(p2));
}

double chained_bound(double p, double p2) {
  const double s = p + p2;
  return binary_entropy_unchecked(0.9 * s) / binary_entropy_unchecked(0.5 * s);
}

std::size_t grid_intervals(double extent, double step) {
  if (!(step > 0.0) || step > 1e-2) throw DomainError("grid step must lie in (0, 1e-2]");
  return static_cast<std::size_t>(std::ceil(extent / step - 1e-9));
}

void check_step(double step) {
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
}

}  // namespace

double ratio_f(double p, double p2) {
  p = checked_prob(p);
  p2 = checked_prob(p2);
  const double denom = binary_entropy_unchecked(p) + binary_entropy_unchecked(p2);
  if (denom <= 0.0) throw DomainError("ratio_f undefined: H(p) + H(p') = 0");
  return 2.0 * binary_entropy_unchecked(union_unchecked(p, p2)) / denom;
}

double ratio_g(double p) {
  if (!(p > 0.0) || p > 1.0) throw DomainError("ratio_g needs p in (0, 1]");
  return binary_entropy_unchecked(0.9 * p) / binary_entropy_unchecked(0.5 * p);
}

double single_point_ratio(double p) {
  p = checked_prob(p);
  const double h = binary_entropy_unchecked(p);
  if (h <= 0.0) throw DomainError("single_point_ratio undefined at p in {0, 1}");
  return binary_entropy_unchecked(union_unchecked(p, p)) / h;
}

bool better_point(const GridPoint& a, const GridPoint& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.p != b.p) return a.p < b.p;
  return a.p2 < b.p2;
}

// ---------------------------------------------------------------------------

LowBlockScan scan_lemma_l1(double step, unsigned jobs) {
  const std::size_t intervals = grid_intervals(kLowBlockEdge, step);
  auto coord = [&](std::size_t i) { return kLowBlockEdge * static_cast<double>(i) / static_cast<double>(intervals); };

  struct Partial {
    std::size_t points = 0;
    std::size_t violations = 0;
    std::size_t chained_violations = 0;
    GridPoint min{kInf, 0, 0};
    double chained_min = kInf;
  };
  auto parts = map_chunks(intervals + 1, resolve_jobs(jobs), [&](std::size_t begin, std::size_t end) {
    Partial part;
    for (std::size_t i = begin; i < end; ++i) {
      const double p = coord(i);
      for (std::size_t j = 0; j <= intervals; ++j) {
        if (i == 0 && j == 0) continue;
        const double p2 = coord(j);
        const double f = ratio_f_unchecked(p, p2);
        ++part.points;
        if (f < kLowBlockBound) ++part.violations;
        const GridPoint here{f, p, p2};
        if (better_point(here, part.min)) part.min = here;
        const double margin = f - chained_bound(p, p2);
        part.chained_min = std::min(part.chained_min, margin);
        if (margin < -1e-9) ++part.chained_violations;
      }
    }
    return part;
  });

  LowBlockScan scan;
  scan.step = step;
  scan.grid_min = {kInf, 0, 0};
  scan.chained_min_margin = kInf;
  for (const auto& part : parts) {
    scan.points += part.points;
    scan.violations += part.violations;
    scan.chained_violations += part.chained_violations;
    if (better_point(part.min, scan.grid_min)) scan.grid_min = part.min;
    scan.chained_min_margin = std::min(scan.chained_min_margin, part.chained_min);
  }

  // Pattern search from the grid minimum, confined to the block.
  GridPoint best = scan.grid_min;
  double h = kLowBlockEdge / static_cast<double>(intervals);
  static constexpr std::array<std::array<int, 2>, 8> kMoves{
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}}};
  for (int guard = 0; h >= kRefineCell && guard < 100000; ++guard) {
    bool improved = false;
    for (const auto& mv : kMoves) {
      const double p = std::clamp(best.p + mv[0] * h, 0.0, kLowBlockEdge);
      const double p2 = std::clamp(best.p2 + mv[1] * h, 0.0, kLowBlockEdge);
      if (p == 0.0 && p2 == 0.0) continue;
      const GridPoint cand{ratio_f_unchecked(p, p2), p, p2};
      if (cand.value < best.value) {
        best = cand;
        improved = true;
      }
    }
    if (!improved) h *= 0.5;
  }
  scan.refined_min = best;
  return scan;
}

VerificationReport to_report(const LowBlockScan& scan) {
  VerificationReport r;
  r.subject = "low-probability union bound f >= 1.4 on [0, 0.1]^2";
  r.add_check("no grid point below 1.4", -static_cast<double>(scan.violations), 0.0, 0.0);
  r.add_check("grid minimum of f >= 1.4", scan.grid_min.value, kLowBlockBound, 0.0);
  r.add_check("refined minimum of f >= 1.4", scan.refined_min.value, kLowBlockBound, 0.0);
  r.add_check("f >= H(0.9 s) / H(0.5 s) everywhere", scan.chained_min_margin, 0.0, 1e-9);
  r.add_check("g(0.2) >= 1.45", ratio_g(0.2), 1.45, 0.0);
  r.details["step"] = scan.step;
  r.details["points"] = scan.points;
  r.details["violations"] = scan.violations;
  r.details["grid_min"] = to_json(scan.grid_min);
  r.details["refined_min"] = to_json(scan.refined_min);
  r.details["chained_min_margin"] = json_number(scan.chained_min_margin);
  r.details["chained_violations"] = scan.chained_violations;
  r.details["g_at_0.2"] = ratio_g(0.2);
  return r;
}

ConcavityScan scan_lemma_l2(double step, unsigned jobs) {
  check_step(step);
  const std::size_t intervals = grid_intervals(1.0, step);
  auto coord = [&](std::size_t i) { return static_cast<double>(i) / static_cast<double>(intervals); };

  struct Partial {
    std::size_t points = 0;
    std::size_t violations = 0;
    GridPoint min{kInf, 0, 0};
    double edge = 0.0;
  };
  auto parts = map_chunks(intervals + 1, resolve_jobs(jobs), [&](std::size_t begin, std::size_t end) {
    Partial part;
    for (std::size_t i = begin; i < end; ++i) {
      const double p = coord(i);
      const bool edge_row = i == 0 || i == intervals;
      for (std::size_t j = 0; j <= intervals; ++j) {
        const double p2 = coord(j);
        const double margin = binary_entropy_unchecked(union_unchecked(p, p2)) -
                              (1.0 - p) * binary_entropy_unchecked(p2);
        ++part.points;
        if (margin < -1e-12) ++part.violations;
        const GridPoint here{margin, p, p2};
        if (better_point(here, part.min)) part.min = here;
        if (edge_row) part.edge = std::max(part.edge, std::abs(margin));
      }
    }
    return part;
  });

  ConcavityScan scan;
  scan.step = step;
  scan.min_margin = {kInf, 0, 0};
  for (const auto& part : parts) {
    scan.points += part.points;
    scan.violations += part.violations;
    if (better_point(part.min, scan.min_margin)) scan.min_margin = part.min;
    scan.edge_max_abs = std::max(scan.edge_max_abs, part.edge);
  }
  return scan;
}

VerificationReport to_report(const ConcavityScan& scan) {
  VerificationReport r;
  r.subject = "H(p + p' - p p') >= (1 - p) H(p') on [0, 1]^2";
  r.add_check("minimum margin >= 0", scan.min_margin.value, 0.0, 1e-12);
  r.add_check("equality on edges p in {0, 1}", -scan.edge_max_abs, 0.0, 1e-12);
  r.details["step"] = scan.step;
  r.details["points"] = scan.points;
  r.details["violations"] = scan.violations;
  r.details["min_margin"] = to_json(scan.min_margin);
  r.details["edge_max_abs"] = scan.edge_max_abs;
  return r;
}

// ---------------------------------------------------------------------------

double DecompositionReport::observed_ratio() const {
  return h_x_given_c > 0.0 ? lhs_total / h_x_given_c : std::nan("");
}

DecompositionReport verify_instance(const LemmaInstance& inst, double ratio) {
  DecompositionReport d;
  d.ratio = ratio;
  d.mu = inst.mu();
  d.threshold = inst.threshold();
  d.mean_p = inst.mean_p();
  d.hypothesis_ok = inst.hypothesis_ok();

  const auto& e = inst.entries();
  std::vector<char> low(e.size());
  std::vector<double> h(e.size());
  long double pr0 = 0.0L, pr1 = 0.0L, h0 = 0.0L, h1 = 0.0L;
  for (std::size_t i = 0; i < e.size(); ++i) {
    low[i] = e[i].p <= d.threshold;
    h[i] = binary_entropy_unchecked(e[i].p);
    if (low[i]) {
      pr0 += e[i].weight;
      h0 += static_cast<long double>(e[i].weight) * h[i];
    } else {
      pr1 += e[i].weight;
      h1 += static_cast<long double>(e[i].weight) * h[i];
    }
  }

  long double t00 = 0.0L, t01 = 0.0L, t11 = 0.0L;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const long double wi = e[i].weight;
    const long double diag = wi * wi * binary_entropy_unchecked(union_unchecked(e[i].p, e[i].p));
    (low[i] ? t00 : t11) += diag;
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      const long double v = 2.0L * wi * e[j].weight * binary_entropy_unchecked(union_unchecked(e[i].p, e[j].p));
      if (low[i] && low[j]) {
        t00 += v;
      } else if (!low[i] && !low[j]) {
        t11 += v;
      } else {
        t01 += v;
      }
    }
  }

  d.pr_c0 = static_cast<double>(pr0);
  d.pr_c1 = static_cast<double>(pr1);
  d.term_00 = static_cast<double>(t00);
  d.term_01 = static_cast<double>(t01);
  d.term_11 = static_cast<double>(t11);
  d.h_x_given_c = inst.conditional_entropy();
  d.h_x_given_c0 = pr0 > 0.0L ? static_cast<double>(h0 / pr0) : 0.0;
  d.h_x_given_c1 = pr1 > 0.0L ? static_cast<double>(h1 / pr1) : 0.0;
  d.lhs_total = pairwise_union_entropy(inst);
  d.rhs_total = ratio * d.h_x_given_c;

  d.markov_margin = d.mean_p / d.threshold - d.pr_c1;
  d.low_low_margin = d.term_00 - kLowLowFactor * d.pr_c0 * d.h_x_given_c0;
  d.mixed_margin = d.term_01 - kMixedFactor * d.pr_c1 * d.h_x_given_c1;
  d.main_margin = d.lhs_total - d.rhs_total;
  d.decomposition_residual = d.lhs_total - (d.term_00 + d.term_01 + d.term_11);
  d.split_residual = d.h_x_given_c - (d.pr_c0 * d.h_x_given_c0 + d.pr_c1 * d.h_x_given_c1);
  return d;
}

VerificationReport to_report(const DecompositionReport& d) {
  VerificationReport r;
  r.subject = "H(X u X' | C, C') >= ratio H(X | C)";
  r.hypothesis_ok = d.hypothesis_ok;
  r.add_check("Markov: Pr[C1] <= mean_p / t", d.mean_p / d.threshold, d.pr_c1, 1e-12);
  r.add_check("low/low block >= 1.26 Pr[C0] H(X | C0)", d.term_00, kLowLowFactor * d.pr_c0 * d.h_x_given_c0,
              1e-9, true);
  r.add_check("mixed block >= 1.62 Pr[C1] H(X | C1)", d.term_01, kMixedFactor * d.pr_c1 * d.h_x_given_c1, 1e-9,
              true);
  r.add_check("main inequality", d.lhs_total, d.rhs_total, 1e-9, true);
  r.add_check("three-block decomposition is exact", -std::abs(d.decomposition_residual), 0.0, 1e-12);
  r.add_check("H(X | C) splits over C0, C1", -std::abs(d.split_residual), 0.0, 1e-12);

  r.details["ratio"] = d.ratio;
  r.details["mu"] = d.mu;
  r.details["threshold"] = d.threshold;
  r.details["mean_p"] = d.mean_p;
  r.details["pr_c0"] = d.pr_c0;
  r.details["pr_c1"] = d.pr_c1;
  r.details["term_00"] = d.term_00;
  r.details["term_01"] = d.term_01;
  r.details["term_11"] = d.term_11;
  r.details["h_x_given_c"] = d.h_x_given_c;
  r.details["h_x_given_c0"] = d.h_x_given_c0;
  r.details["h_x_given_c1"] = d.h_x_given_c1;
  r.details["lhs_total"] = d.lhs_total;
  r.details["rhs_total"] = d.rhs_total;
  r.details["observed_ratio"] = d.h_x_given_c > 0.0 ? Json(d.observed_ratio()) : Json(nullptr);
  return r;
}

// ---------------------------------------------------------------------------

InstanceProfile parse_profile(const std::string& name) {
  if (name == "smooth") return InstanceProfile::kSmooth;
  if (name == "spiky") return InstanceProfile::kSpiky;
  if (name == "boundary") return InstanceProfile::kBoundary;
  throw UsageError("unknown profile '" + name + "' (smooth|spiky|boundary)");
}

const char* to_string(InstanceProfile p) noexcept {
  switch (p) {
    case InstanceProfile::kSmooth: return "smooth";
    case InstanceProfile::kSpiky: return "spiky";
    case InstanceProfile::kBoundary: return "boundary";
  }
  return "unknown";
}

LemmaInstance random_instance(std::size_t size, double mu, std::uint64_t seed, InstanceProfile profile,
                              double threshold) {
  if (size == 0) throw UsageError("random_instance needs size >= 1");
  mu = checked_prob(mu);
  Rng rng(seed);
  std::vector<LemmaEntry> entries(size);
  switch (profile) {
    case InstanceProfile::kSmooth: {
      const double spread = rng.uniform(0.0, 4.0 * mu);
      for (auto& e : entries) e = {rng.exponential(), rng.uniform() * spread};
      break;
    }
    case InstanceProfile::kSpiky: {
      for (std::size_t i = 0; i < size; ++i) {
        if (i == 0 || rng.uniform() < 0.2) {
          entries[i] = {0.01 * rng.exponential(), rng.uniform(0.9, 0.999)};
        } else {
          entries[i] = {rng.exponential(), rng.uniform() < 0.5 ? 0.0 : rng.uniform() * mu};
        }
      }
      break;
    }
    case InstanceProfile::kBoundary: {
      for (auto& e : entries) {
        const double p = rng.uniform() < 0.3 ? 0.0 : std::min(1.0, threshold * rng.uniform(0.8, 1.2));
        e = {rng.exponential(), p};
      }
      break;
    }
  }

  long double total = 0.0L, mass = 0.0L;
  for (const auto& e : entries) total += e.weight;
  for (const auto& e : entries) mass += static_cast<long double>(e.weight) * e.p;
  const double mean = static_cast<double>(mass / total);
  if (mean > mu) {
    if (profile == InstanceProfile::kSmooth) {
      const double scale = mu / mean;
      for (auto& e : entries) e.p *= scale;
    } else {
      // Sink with p = 0 absorbing 1 - mu / mean of the weight.
      const double keep = mu / mean;
      for (auto& e : entries) e.weight = static_cast<double>(e.weight / total) * keep;
      entries.push_back({1.0 - keep, 0.0});
    }
  }
  return LemmaInstance(std::move(entries), mu, threshold);
}

// ---------------------------------------------------------------------------

namespace {

struct AnnealState {
  std::vector<double> logits;
  std::vector<double> raw_p;
};

LemmaInstance materialize(const AnnealState& s, double mu) {
  const double top = *std::max_element(s.logits.begin(), s.logits.end());
  std::vector<LemmaEntry> entries(s.logits.size());
  long double total = 0.0L, mass = 0.0L;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].weight = std::exp(s.logits[i] - top);
    total += entries[i].weight;
    mass += static_cast<long double>(entries[i].weight) * s.raw_p[i];
  }
  const double mean = static_cast<double>(mass / total);
  const double scale = mean > mu ? mu / mean : 1.0;
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].p = std::min(1.0, s.raw_p[i] * scale);
  return LemmaInstance(std::move(entries), mu);
}

double objective(const LemmaInstance& inst) {
  const double h = inst.conditional_entropy();
  if (!(h > 1e-300)) return kInf;
  return pairwise_union_entropy(inst) / h;
}

struct RestartOutcome {
  double ratio = kInf;
  LemmaInstance best;
};

RestartOutcome anneal(const MinimizeOptions& o, std::size_t restart) {
  Rng rng(Rng::derive(o.seed, restart));
  const std::size_t m = std::max<std::size_t>(1, o.size);
  AnnealState cur;
  cur.logits.resize(m);
  cur.raw_p.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    cur.logits[i] = rng.normal();
    cur.raw_p[i] = rng.uniform();
  }
  LemmaInstance cur_inst = materialize(cur, o.mu);
  double cur_val = objective(cur_inst);
  RestartOutcome out{cur_val, cur_inst};

  constexpr double kT0 = 0.05;
  constexpr double kT1 = 1e-6;
  const double iters = static_cast<double>(std::max<std::size_t>(1, o.iters));
  for (std::size_t k = 0; k < o.iters; ++k) {
    const double temp = kT0 * std::pow(kT1 / kT0, static_cast<double>(k) / iters);
    const double shrink = std::sqrt(temp / kT0);
    AnnealState next = cur;
    const std::size_t i = rng.below(m);
    const double move = rng.uniform();
    if (move < 0.45) {
      next.logits[i] += std::max(1e-3, shrink) * rng.normal();
    } else if (move < 0.9) {
      next.raw_p[i] = std::clamp(next.raw_p[i] + std::max(1e-4, 0.2 * shrink) * rng.normal(), 0.0, 1.0);
    } else {
      next.raw_p[i] = cur.raw_p[rng.below(m)];
    }
    LemmaInstance inst = materialize(next, o.mu);
    const double val = objective(inst);
    const double delta = val - cur_val;
    if (delta <= 0.0 || (std::isfinite(val) && rng.uniform() < std::exp(-delta / temp))) {
      cur = std::move(next);
      cur_val = val;
      if (val < out.ratio) {
        out.ratio = val;
        out.best = inst;
      }
    }
  }
  return out;
}

}  // namespace

MinimizeResult adversarial_minimize(const MinimizeOptions& options) {
  if (options.iters == 0) throw UsageError("adversarial_minimize needs iters >= 1");
  if (options.restarts == 0) throw UsageError("adversarial_minimize needs restarts >= 1");
  if (!(options.mu > 0.0) || options.mu > 1.0) throw DomainError("mu must lie in (0, 1]");

  auto chunks = map_chunks(options.restarts, resolve_jobs(options.jobs), [&](std::size_t begin, std::size_t end) {
    std::vector<RestartOutcome> outs;
    for (std::size_t r = begin; r < end; ++r) outs.push_back(anneal(options, r));
    return outs;
  });

  MinimizeResult result;
  std::size_t r = 0;
  for (auto& chunk : chunks) {
    for (auto& out : chunk) {
      result.restart_ratios.push_back(out.ratio);
      if (out.ratio < result.min_ratio) {
        result.min_ratio = out.ratio;
        result.best = std::move(out.best);
        result.best_restart = r;
      }
      ++r;
    }
  }
  result.critical = options.mu <= kDefaultMu + 1e-15 && result.min_ratio < kDefaultRatio;
  return result;
}

// ---------------------------------------------------------------------------

std::vector<GridRow> figure1_grid(double step) {
  check_step(step);
  const auto intervals = static_cast<std::size_t>(std::ceil(kLowBlockEdge / step - 1e-9));
  std::vector<GridRow> rows;
  rows.reserve((intervals + 1) * (intervals + 1));
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double p = kLowBlockEdge * static_cast<double>(i) / static_cast<double>(intervals);
    for (std::size_t j = 0; j <= intervals; ++j) {
      if (i == 0 && j == 0) continue;
      const double p2 = kLowBlockEdge * static_cast<double>(j) / static_cast<double>(intervals);
      rows.push_back({p, p2, ratio_f_unchecked(p, p2)});
    }
  }
  return rows;
}

GridPoint grid_minimum(const std::vector<GridRow>& rows) {
  GridPoint best{kInf, 0, 0};
  for (const auto& r : rows) {
    const GridPoint here{r.f, r.p, r.p2};
    if (better_point(here, best)) best = here;
  }
  return best;
}

void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows) {
  out << "p,p_prime,f\n";
  for (const auto& r : rows) out << format_real(r.p) << ',' << format_real(r.p2) << ',' << format_real(r.f) << '\n';
}

Json to_json(const LemmaInstance& inst) {
  Json j;
  j["size"] = inst.size();
  j["mu"] = inst.mu();
  j["threshold"] = inst.threshold();
  j["mean_p"] = inst.mean_p();
  j["hypothesis_ok"] = inst.hypothesis_ok();
  Json entries = Json::array();
  for (const auto& e : inst.entries()) entries.push_back(Json::array({e.weight, e.p}));
  j["entries"] = std::move(entries);
  return j;
}

Json to_json(const GridPoint& p) {
  Json j;
  j["value"] = json_number(p.value);
  j["p"] = p.p;
  j["p_prime"] = p.p2;
  return j;
}

Json to_json(const MinimizeResult& r) {
  Json j;
  j["min_ratio"] = json_number(r.min_ratio);
  j["best_restart"] = r.best_restart;
  Json ratios = Json::array();
  for (double v : r.restart_ratios) ratios.push_back(json_number(v));
  j["restart_ratios"] = std::move(ratios);
  j["critical"] = r.critical;
  j["witness"] = to_json(r.best);
  return j;
}

}  // namespace uclab
