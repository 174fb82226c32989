#include "uclab/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "uclab/conjecture_lab.hpp"
#include "uclab/entropy.hpp"
#include "uclab/errors.hpp"
#include "uclab/families.hpp"
#include "uclab/lemma_engine.hpp"
#include "uclab/parallel.hpp"
#include "uclab/rng.hpp"
#include "uclab/subset_dist.hpp"
#include "uclab/text_format.hpp"

namespace uclab::cli {

int exit_code_for(Verdict v) noexcept {
  switch (v) {
    case Verdict::kPass: return kExitOk;
    case Verdict::kHypothesisViolation: return kExitHypothesis;
    case Verdict::kFail: return kExitCritical;
  }
  return kExitCritical;
}

Json strip_timing(const Json& report) {
  Json copy = report;
  copy.erase("timing_ms");
  return copy;
}

namespace {

struct Outcome {
  Json parameters = Json::object();
  std::optional<std::uint64_t> seed;
  Json results = Json::object();
  int code = kExitOk;
};

Outcome from_report(const VerificationReport& r) {
  Outcome o;
  o.results = to_json(r);
  o.code = exit_code_for(r.verdict());
  return o;
}

std::string display12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  fn(out);
  if (!out) throw UsageError("failed writing " + path);
}

// --- distribution inputs ---------------------------------------------------

struct DistSource {
  std::string file;
  std::string gen;
  int n = 4;
  double p = 0.01;
  double q = 0.99;
  std::size_t support = 16;
  double gen_mu = kDefaultMu;
  std::optional<std::uint64_t> seed;
};

void add_dist_source(CLI::App* app, DistSource& s) {
  auto* file = app->add_option("--file", s.file, "Distribution file");
  auto* gen = app->add_option("--gen", s.gen, "Generator: product | two-point | gated | random")
                  ->check(CLI::IsMember({"product", "two-point", "gated", "random"}));
  file->excludes(gen);
  app->add_option("--n", s.n, "Ground set size for --gen");
  app->add_option("--p", s.p, "Bit probability for --gen");
  app->add_option("--q", s.q, "Inner probability for --gen gated");
  app->add_option("--support", s.support, "Support size for --gen random");
  app->add_option("--gen-mu", s.gen_mu, "Marginal cap for --gen random");
  app->add_option("--seed", s.seed, "Seed for --gen random");
}

SubsetDistribution load_source(const DistSource& s, Outcome& o) {
  if (!s.file.empty()) {
    o.parameters["file"] = s.file;
    return load_distribution(s.file);
  }
  if (s.gen.empty()) throw UsageError("give --file or --gen");
  o.parameters["gen"] = s.gen;
  o.parameters["n"] = s.n;
  if (s.gen == "product") {
    o.parameters["p"] = s.p;
    return product_bernoulli(s.n, s.p);
  }
  if (s.gen == "two-point") {
    o.parameters["p"] = s.p;
    return two_point(s.n, s.p);
  }
  if (s.gen == "gated") {
    o.parameters["p"] = s.p;
    o.parameters["q"] = s.q;
    return gated_product(s.n, s.p, s.q);
  }
  if (!s.seed) throw UsageError("--gen random requires --seed");
  o.parameters["support"] = s.support;
  o.parameters["gen_mu"] = s.gen_mu;
  o.seed = s.seed;
  return random_distribution(s.n, s.support, s.gen_mu, *s.seed);
}

// --- family inputs ---------------------------------------------------------

struct FamilySource {
  std::string file;
  int power_set_n = 0;
  bool random = false;
  int n = 6;
  std::size_t k = 4;
  std::optional<std::uint64_t> seed;
};

void add_family_source(CLI::App* app, FamilySource& s) {
  auto* file = app->add_option("--file", s.file, "Family file");
  auto* ps = app->add_option("--power-set", s.power_set_n, "Use the power set of [N]");
  auto* rnd = app->add_flag("--random", s.random, "Closure of --k random generators on [--n]");
  file->excludes(ps)->excludes(rnd);
  ps->excludes(rnd);
  app->add_option("--n", s.n, "Ground set size for --random");
  app->add_option("--k", s.k, "Generator count for --random");
  app->add_option("--seed", s.seed, "Seed for --random");
}

SetFamily load_source(const FamilySource& s, Outcome& o) {
  if (!s.file.empty()) {
    o.parameters["file"] = s.file;
    return load_family(s.file);
  }
  if (s.power_set_n > 0) {
    o.parameters["power_set"] = s.power_set_n;
    return power_set(s.power_set_n);
  }
  if (!s.random) throw UsageError("give --file, --power-set or --random");
  if (!s.seed) throw UsageError("--random requires --seed");
  o.parameters["random"] = true;
  o.parameters["n"] = s.n;
  o.parameters["k"] = s.k;
  o.seed = s.seed;
  return random_union_closed(s.n, s.k, *s.seed);
}

Json family_summary(const SetFamily& f) { return to_json(f); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy and union-closed family toolkit", "uclab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  unsigned jobs_flag = 0;
  app.add_option("--jobs", jobs_flag, "Worker threads (default: UCLAB_JOBS or 1)");

  std::vector<std::pair<CLI::App*, std::function<Outcome()>>> leaves;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc) {
    return parent->add_subcommand(name, desc);
  };
  unsigned jobs = 1;

  // ---- entropy ------------------------------------------------------------
  std::vector<double> h_points, f_pair, g_points;
  auto* entropy_cmd = app.add_subcommand("entropy", "Evaluate H(p), f(p, p') and g(p)");
  entropy_cmd->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  entropy_cmd->add_option("--h", h_points, "Points for H");
  entropy_cmd->add_option("--f", f_pair, "A pair p p' for f")->expected(2);
  entropy_cmd->add_option("--g", g_points, "Points for g");
  leaves.emplace_back(entropy_cmd, [&] {
    Outcome o;
    if (h_points.empty() && f_pair.empty() && g_points.empty()) throw UsageError("give --h, --f or --g");
    auto item = [](Json args, double v) {
      Json j;
      j["args"] = std::move(args);
      j["value"] = v;
      j["display"] = display12(v);
      return j;
    };
    if (!h_points.empty()) {
      o.parameters["h"] = h_points;
      Json arr = Json::array();
      for (double p : h_points) arr.push_back(item(Json::array({p}), binary_entropy(p)));
      o.results["h"] = std::move(arr);
    }
    if (!f_pair.empty()) {
      o.parameters["f"] = f_pair;
      o.results["f"] = item(f_pair, ratio_f(f_pair[0], f_pair[1]));
    }
    if (!g_points.empty()) {
      o.parameters["g"] = g_points;
      Json arr = Json::array();
      for (double p : g_points) arr.push_back(item(Json::array({p}), ratio_g(p)));
      o.results["g"] = std::move(arr);
    }
    return o;
  });

  // ---- lemma --------------------------------------------------------------
  auto* lemma = app.add_subcommand("lemma", "Bit-level inequality checks");
  lemma->require_subcommand(1);

  double l1_step = 1e-3;
  auto* scan_l1 = leaf(lemma, "scan-l1", "Scan f >= 1.4 on [0, 0.1]^2");
  scan_l1->add_option("--step", l1_step, "Grid spacing")->capture_default_str();
  leaves.emplace_back(scan_l1, [&] {
    auto o = from_report(to_report(scan_lemma_l1(l1_step, jobs)));
    o.parameters["step"] = l1_step;
    return o;
  });

  double l2_step = 1e-3;
  auto* scan_l2 = leaf(lemma, "scan-l2", "Scan H(p + p' - pp') >= (1 - p) H(p') on [0, 1]^2");
  scan_l2->add_option("--step", l2_step, "Grid spacing")->capture_default_str();
  leaves.emplace_back(scan_l2, [&] {
    auto o = from_report(to_report(scan_lemma_l2(l2_step, jobs)));
    o.parameters["step"] = l2_step;
    return o;
  });

  std::string inst_file;
  double v_ratio = kDefaultRatio, v_mu = kDefaultMu, v_threshold = kDefaultThreshold;
  auto* verify = leaf(lemma, "verify", "Decompose and check one instance file");
  verify->add_option("--file", inst_file, "Instance file ('q p' per line)")->required();
  verify->add_option("--ratio", v_ratio)->capture_default_str();
  verify->add_option("--mu", v_mu)->capture_default_str();
  verify->add_option("--threshold", v_threshold)->capture_default_str();
  leaves.emplace_back(verify, [&] {
    const auto inst = load_instance(inst_file, v_mu, v_threshold);
    auto o = from_report(to_report(verify_instance(inst, v_ratio)));
    o.parameters["file"] = inst_file;
    o.parameters["ratio"] = v_ratio;
    o.parameters["mu"] = v_mu;
    o.parameters["threshold"] = v_threshold;
    o.results["instance"] = to_json(inst);
    return o;
  });

  MinimizeOptions min_opts;
  std::optional<std::uint64_t> min_seed;
  auto* minimize = leaf(lemma, "minimize", "Anneal toward the smallest ratio under mean_p <= mu");
  minimize->add_option("--seed", min_seed, "Seed")->required();
  minimize->add_option("--mu", min_opts.mu)->capture_default_str();
  minimize->add_option("--iters", min_opts.iters)->capture_default_str();
  minimize->add_option("--size", min_opts.size)->capture_default_str();
  minimize->add_option("--restarts", min_opts.restarts)->capture_default_str();
  leaves.emplace_back(minimize, [&] {
    Outcome o;
    min_opts.seed = *min_seed;
    min_opts.jobs = jobs;
    const auto res = adversarial_minimize(min_opts);
    o.seed = min_seed;
    o.parameters["mu"] = min_opts.mu;
    o.parameters["iters"] = min_opts.iters;
    o.parameters["size"] = min_opts.size;
    o.parameters["restarts"] = min_opts.restarts;
    o.results = to_json(res);
    o.results["single_point_ratio"] = single_point_ratio(min_opts.mu);
    if (res.critical) {
      err << "CRITICAL: ratio " << res.min_ratio << " below 1.26 at mu = " << min_opts.mu << '\n';
      o.code = kExitCritical;
    }
    return o;
  });

  std::size_t batch_count = 1000, batch_max_size = 64;
  double batch_mu = kDefaultMu;
  std::optional<std::uint64_t> batch_seed;
  auto* batch = leaf(lemma, "random", "Verify a batch of seeded random instances");
  batch->add_option("--seed", batch_seed, "Seed")->required();
  batch->add_option("--count", batch_count)->capture_default_str();
  batch->add_option("--max-size", batch_max_size)->capture_default_str();
  batch->add_option("--mu", batch_mu)->capture_default_str();
  leaves.emplace_back(batch, [&] {
    Outcome o;
    o.seed = batch_seed;
    o.parameters["count"] = batch_count;
    o.parameters["max_size"] = batch_max_size;
    o.parameters["mu"] = batch_mu;
    constexpr InstanceProfile kProfiles[] = {InstanceProfile::kSmooth, InstanceProfile::kSpiky,
                                             InstanceProfile::kBoundary};
    std::size_t failures = 0;
    double worst_main = kInf, worst_markov = kInf, worst_low = kInf, worst_mixed = kInf, worst_decomp = 0.0;
    Json first_failure = nullptr;
    for (std::size_t k = 0; k < batch_count; ++k) {
      const std::uint64_t s = Rng::derive(*batch_seed, k);
      const std::size_t size = 1 + static_cast<std::size_t>(s % std::max<std::size_t>(1, batch_max_size));
      const auto inst = random_instance(size, batch_mu, s, kProfiles[k % 3]);
      const auto d = verify_instance(inst);
      const auto rep = to_report(d);
      worst_main = std::min(worst_main, d.main_margin);
      worst_markov = std::min(worst_markov, d.markov_margin);
      worst_low = std::min(worst_low, d.low_low_margin);
      worst_mixed = std::min(worst_mixed, d.mixed_margin);
      worst_decomp = std::max(worst_decomp, std::abs(d.decomposition_residual));
      if (rep.verdict() == Verdict::kFail) {
        if (failures++ == 0) first_failure = to_json(inst);
      }
    }
    o.results["instances"] = batch_count;
    o.results["failures"] = failures;
    o.results["worst_main_margin"] = json_number(worst_main);
    o.results["worst_markov_margin"] = json_number(worst_markov);
    o.results["worst_low_low_margin"] = json_number(worst_low);
    o.results["worst_mixed_margin"] = json_number(worst_mixed);
    o.results["max_decomposition_residual"] = worst_decomp;
    o.results["first_failure"] = first_failure;
    if (failures > 0) o.code = kExitCritical;
    return o;
  });

  double fig_step = 1e-3;
  std::string fig_out;
  auto* figure = leaf(lemma, "figure1", "Write the f(p, p') grid as CSV");
  figure->add_option("--step", fig_step)->capture_default_str();
  figure->add_option("--out", fig_out, "CSV output path")->required();
  leaves.emplace_back(figure, [&] {
    Outcome o;
    o.parameters["step"] = fig_step;
    o.parameters["out"] = fig_out;
    const auto rows = figure1_grid(fig_step);
    write_file(fig_out, [&](std::ostream& os) { write_grid_csv(os, rows); });
    o.results["rows"] = rows.size();
    o.results["minimum"] = to_json(grid_minimum(rows));
    return o;
  });

  // ---- dist ---------------------------------------------------------------
  auto* dist = app.add_subcommand("dist", "Subset distributions");
  dist->require_subcommand(1);

  DistSource ent_src;
  auto* d_entropy = leaf(dist, "entropy", "H(A)");
  add_dist_source(d_entropy, ent_src);
  leaves.emplace_back(d_entropy, [&] {
    Outcome o;
    const auto d = load_source(ent_src, o);
    o.results["n"] = d.n();
    o.results["support_size"] = d.support_size();
    o.results["residual"] = d.residual();
    o.results["entropy"] = dist_entropy(d);
    return o;
  });

  DistSource union_src;
  std::string union_out;
  auto* d_union = leaf(dist, "union", "Law of A u B");
  add_dist_source(d_union, union_src);
  d_union->add_option("--out", union_out, "Write the union distribution here");
  leaves.emplace_back(d_union, [&] {
    Outcome o;
    const auto d = load_source(union_src, o);
    const auto u = union_distribution(d);
    if (!union_out.empty()) {
      o.parameters["out"] = union_out;
      write_file(union_out, [&](std::ostream& os) { write_distribution(os, u); });
    }
    o.results["h_a"] = dist_entropy(d);
    o.results["h_union"] = dist_entropy(u);
    o.results["union"] = to_json(u);
    return o;
  });

  DistSource marg_src;
  auto* d_marg = leaf(dist, "marginals", "Pr[i in A] for every i");
  add_dist_source(d_marg, marg_src);
  leaves.emplace_back(d_marg, [&] {
    Outcome o;
    const auto d = load_source(marg_src, o);
    const auto m = marginals(d);
    o.results["marginals"] = m;
    o.results["max"] = m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
    return o;
  });

  DistSource thm_src;
  double thm_ratio = kDefaultRatio, thm_mu = kDefaultMu;
  auto* d_thm = leaf(dist, "check-thm1", "Check H(A u B) >= ratio H(A) bit by bit");
  add_dist_source(d_thm, thm_src);
  d_thm->add_option("--ratio", thm_ratio)->capture_default_str();
  d_thm->add_option("--mu", thm_mu)->capture_default_str();
  leaves.emplace_back(d_thm, [&] {
    Outcome tmp;
    const auto d = load_source(thm_src, tmp);
    auto o = from_report(check_theorem1(d, thm_ratio, thm_mu));
    o.parameters = tmp.parameters;
    o.seed = tmp.seed;
    o.parameters["ratio"] = thm_ratio;
    o.parameters["mu"] = thm_mu;
    return o;
  });

  DistSource chain_src;
  auto* d_chain = leaf(dist, "bit-chain", "H(A_i | A_<i) for every bit");
  add_dist_source(d_chain, chain_src);
  leaves.emplace_back(d_chain, [&] {
    Outcome o;
    const auto d = load_source(chain_src, o);
    const auto chain = bit_chain(d);
    o.results = to_json(chain);
    o.results["entropy"] = dist_entropy(d);
    o.results["chain_residual"] = chain.total() - dist_entropy(d);
    return o;
  });

  int ex_which = 1, ex_n = 6;
  double ex_p = 0.01, ex_q = 0.99;
  auto* d_example = leaf(dist, "example", "Closed-form examples: product (1), two-point (2), gated (3)");
  d_example->add_option("--which", ex_which)->check(CLI::Range(1, 3))->required();
  d_example->add_option("--n", ex_n)->capture_default_str();
  d_example->add_option("--p", ex_p)->capture_default_str();
  d_example->add_option("--q", ex_q)->capture_default_str();
  leaves.emplace_back(d_example, [&] {
    const double u = union_prob(ex_p, ex_p);
    const double hp = binary_entropy(ex_p);
    const double hu = binary_entropy(u);
    SubsetDistribution d;
    double closed_a = 0.0, closed_u = 0.0;
    switch (ex_which) {
      case 1:
        d = product_bernoulli(ex_n, ex_p);
        closed_a = ex_n * hp;
        closed_u = ex_n * hu;
        break;
      case 2:
        d = two_point(ex_n, ex_p);
        closed_a = hp;
        closed_u = hu;
        break;
      default: {
        d = gated_product(ex_n, ex_p, ex_q);
        const double hq = binary_entropy(ex_q);
        const double hqu = binary_entropy(union_prob(ex_q, ex_q));
        closed_a = hp + ex_p * hq * (ex_n - 1);
        closed_u = hu + 2 * ex_p * (1 - ex_p) * hq * (ex_n - 1) + ex_p * ex_p * hqu * (ex_n - 1);
      }
    }
    const double num_a = dist_entropy(d);
    const double num_u = dist_entropy(union_distribution(d));
    VerificationReport r;
    r.subject = "closed-form entropies of the worked examples";
    r.add_check("H(A) matches closed form", -std::abs(num_a - closed_a), 0.0, 1e-9);
    if (ex_which != 3) {
      r.add_check("H(A u B) matches closed form", -std::abs(num_u - closed_u), 0.0, 1e-9);
    } else {
      // This closed form reveals A_1 and B_1, so it only bounds H(A u B) from below.
      const double revealed = union_entropy_given_first_bits(d);
      r.add_check("closed form = H((A u B)_1) + H((A u B)_>1 | A_1, B_1)", -std::abs(revealed - closed_u), 0.0,
                  1e-9);
      r.add_check("H(A u B) >= closed form", num_u, closed_u, 1e-9);
      r.details["closed_form_shortfall"] = num_u - closed_u;
    }
    r.details["h_a"] = num_a;
    r.details["h_a_closed"] = closed_a;
    r.details["h_union"] = num_u;
    r.details["h_union_closed"] = closed_u;
    r.details["ratio"] = num_a > 0 ? Json(num_u / num_a) : Json(nullptr);
    auto o = from_report(r);
    o.parameters["which"] = ex_which;
    o.parameters["n"] = ex_n;
    o.parameters["p"] = ex_p;
    if (ex_which == 3) o.parameters["q"] = ex_q;
    return o;
  });

  // ---- family -------------------------------------------------------------
  auto* family = app.add_subcommand("family", "Set families");
  family->require_subcommand(1);

  FamilySource check_src;
  auto* f_check = leaf(family, "check", "Is the family union-closed?");
  add_family_source(f_check, check_src);
  leaves.emplace_back(f_check, [&] {
    Outcome o;
    const auto f = load_source(check_src, o);
    const auto c = is_union_closed(f);
    o.results["size"] = f.size();
    o.results["union_closed"] = c.closed;
    if (c.witness) o.results["witness"] = Json::array({format_set(c.witness->first), format_set(c.witness->second)});
    return o;
  });

  FamilySource closure_src;
  std::string closure_out;
  auto* f_closure = leaf(family, "closure", "Union closure of the given sets");
  add_family_source(f_closure, closure_src);
  f_closure->add_option("--out", closure_out, "Write the closed family here");
  leaves.emplace_back(f_closure, [&] {
    Outcome o;
    const auto f = union_closure(load_source(closure_src, o));
    if (!closure_out.empty()) {
      o.parameters["out"] = closure_out;
      write_file(closure_out, [&](std::ostream& os) { write_family(os, f); });
    }
    o.results = family_summary(f);
    return o;
  });

  FamilySource freq_src;
  auto* f_freq = leaf(family, "freq", "Element frequencies");
  add_family_source(f_freq, freq_src);
  leaves.emplace_back(f_freq, [&] {
    Outcome o;
    o.results = to_json(frequency_profile(load_source(freq_src, o)));
    return o;
  });

  FamilySource self_src;
  auto* f_self = leaf(family, "self-union", "{A u B : A, B in F}");
  add_family_source(f_self, self_src);
  leaves.emplace_back(f_self, [&] {
    Outcome o;
    const auto f = load_source(self_src, o);
    const auto g = family_self_union(f);
    o.results = family_summary(g);
    o.results["equals_input"] = g == f;
    return o;
  });

  int enum_n = 3;
  bool enum_list = false;
  auto* f_enum = leaf(family, "enumerate", "All union-closed families on [n], n <= 4");
  f_enum->add_option("--n", enum_n)->required();
  f_enum->add_flag("--list", enum_list, "Include every family in the output");
  leaves.emplace_back(f_enum, [&] {
    Outcome o;
    o.parameters["n"] = enum_n;
    o.parameters["list"] = enum_list;
    const auto fams = enumerate_union_closed(enum_n);
    o.results["count"] = fams.size();
    if (enum_list) {
      Json arr = Json::array();
      for (const auto& f : fams) {
        Json members = Json::array();
        for (Mask m : f.members()) members.push_back(format_set(m));
        arr.push_back(std::move(members));
      }
      o.results["families"] = std::move(arr);
    }
    return o;
  });

  int rnd_n = 6;
  std::size_t rnd_k = 4;
  std::optional<std::uint64_t> rnd_seed;
  std::string rnd_out;
  auto* f_random = leaf(family, "random", "Closure of k random nonempty sets");
  f_random->add_option("--n", rnd_n)->capture_default_str();
  f_random->add_option("--k", rnd_k)->capture_default_str();
  f_random->add_option("--seed", rnd_seed)->required();
  f_random->add_option("--out", rnd_out, "Write the family here");
  leaves.emplace_back(f_random, [&] {
    Outcome o;
    o.seed = rnd_seed;
    o.parameters["n"] = rnd_n;
    o.parameters["k"] = rnd_k;
    const auto f = random_union_closed(rnd_n, rnd_k, *rnd_seed);
    if (!rnd_out.empty()) {
      o.parameters["out"] = rnd_out;
      write_file(rnd_out, [&](std::ostream& os) { write_family(os, f); });
    }
    o.results = family_summary(f);
    return o;
  });

  int brute_n = 3;
  double brute_bound = kDefaultMu;
  auto* f_brute = leaf(family, "frankl-brute", "Frequency sweep over every union-closed family on [n]");
  f_brute->add_option("--n", brute_n)->required();
  f_brute->add_option("--bound", brute_bound)->capture_default_str();
  leaves.emplace_back(f_brute, [&] {
    auto o = from_report(frankl_brute(brute_n, brute_bound, jobs));
    o.parameters["n"] = brute_n;
    o.parameters["bound"] = brute_bound;
    return o;
  });

  FamilySource kl_src;
  auto* f_kl = leaf(family, "kl-identity", "D(A u B || A) + H(A u B) = log2 |F| for uniform A");
  add_family_source(f_kl, kl_src);
  leaves.emplace_back(f_kl, [&] {
    Outcome tmp;
    const auto f = load_source(kl_src, tmp);
    auto o = from_report(kl_identity_check(f));
    o.parameters = tmp.parameters;
    o.seed = tmp.seed;
    return o;
  });

  // ---- conjecture1 --------------------------------------------------------
  auto* conj = app.add_subcommand("conjecture1", "KL-augmented entropy gap");
  conj->require_subcommand(1);

  DistSource gap_src;
  auto* c_gap = leaf(conj, "gap", "H(A u B) + D(A u B || A) - H(A)");
  add_dist_source(c_gap, gap_src);
  leaves.emplace_back(c_gap, [&] {
    Outcome o;
    const auto g = conjecture1_gap(load_source(gap_src, o));
    o.results = to_json(g);
    o.results["conjecture_violated"] = g.hypothesis_ok && g.gap <= 0.0;
    return o;
  });

  SearchOptions s_opts;
  std::optional<std::uint64_t> s_seed;
  std::string s_out;
  auto* c_search = leaf(conj, "search", "Anneal toward the smallest gap");
  c_search->add_option("--n", s_opts.n)->capture_default_str();
  c_search->add_option("--support", s_opts.support_size)->capture_default_str();
  c_search->add_option("--seed", s_seed)->required();
  c_search->add_option("--iters", s_opts.iters)->capture_default_str();
  c_search->add_option("--restarts", s_opts.restarts)->capture_default_str();
  c_search->add_option("--out", s_out, "Write the witness distribution here");
  leaves.emplace_back(c_search, [&] {
    Outcome o;
    s_opts.seed = *s_seed;
    s_opts.jobs = jobs;
    o.seed = s_seed;
    o.parameters["n"] = s_opts.n;
    o.parameters["support"] = s_opts.support_size;
    o.parameters["iters"] = s_opts.iters;
    o.parameters["restarts"] = s_opts.restarts;
    const auto res = search_conjecture1(s_opts);
    o.results["best"] = to_json(res.best);
    o.results["best_restart"] = res.best_restart;
    Json gaps = Json::array();
    for (double g : res.restart_gaps) gaps.push_back(json_number(g));
    o.results["restart_gaps"] = std::move(gaps);
    o.results["rejected_states"] = res.rejected;
    if (res.witness.n() > 0) {
      std::ostringstream text;
      write_distribution(text, res.witness);
      o.results["witness"] = text.str();
      if (!s_out.empty()) {
        o.parameters["out"] = s_out;
        write_file(s_out, [&](std::ostream& os) { write_distribution(os, res.witness); });
      }
    }
    o.results["negative_gap_found"] = std::isfinite(res.best.gap) && res.best.gap < 0.0;
    return o;
  });

  auto* c_s4 = leaf(conj, "section4", "Parity counterexample for generic functions");
  leaves.emplace_back(c_s4, [&] {
    const auto s4 = section4_counterexample();
    VerificationReport r;
    r.subject = "parity construction entropies";
    r.add_check("H(f(X, X')) = 2", -std::abs(s4.h_f_xx - 2.0), 0.0, 1e-12);
    r.add_check("H(X) = 2", -std::abs(s4.h_x - 2.0), 0.0, 1e-12);
    r.add_check("H(X | C) = 1", -std::abs(s4.h_x_given_c - 1.0), 0.0, 1e-12);
    r.add_check("H(f(X, X') | C, C') = 0", -std::abs(s4.h_f_given_cc), 0.0, 1e-12);
    r.details = to_json(s4);
    return from_report(r);
  });

  // ---- parse and dispatch --------------------------------------------------
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  jobs = resolve_jobs(jobs_flag);

  for (auto& [cmd, handler] : leaves) {
    if (!cmd->parsed()) continue;
    std::string name = cmd->get_name();
    if (cmd->get_parent() != &app) name = cmd->get_parent()->get_name() + " " + name;
    try {
      const auto start = std::chrono::steady_clock::now();
      Outcome o = handler();
      const auto elapsed = std::chrono::steady_clock::now() - start;
      Json report;
      report["command"] = name;
      report["parameters"] = o.parameters;
      report["seed"] = o.seed ? Json(*o.seed) : Json(nullptr);
      report["results"] = o.results;
      report["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
      report["tool_version"] = kToolVersion;
      out << dump_json(report) << '\n';
      if (o.code == kExitHypothesis) err << name << ": hypothesis not satisfied\n";
      if (o.code == kExitCritical) err << name << ": CRITICAL inequality violation, see report\n";
      return o.code;
    } catch (const CapabilityError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const ParseError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::logic_error& e) {
      // UsageError and DomainError
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  err << "error: no command given\n";
  return kExitUsage;
}

}  // namespace uclab::cli
