#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "uclab/errors.hpp"
#include "uclab/lemma_engine.hpp"

using namespace uclab;

TEST(Ratios, FrozenValues) {
  EXPECT_NEAR(ratio_f(0.1, 0.1), 1.495688807042833, 1e-13);
  EXPECT_NEAR(ratio_f(0.01, 0.01), 1.743696433594053, 1e-13);
  EXPECT_NEAR(ratio_g(0.2), 1.450071290699271, 1e-13);
  EXPECT_NEAR(ratio_g(0.1), 1.524002983339608, 1e-13);
  EXPECT_NEAR(single_point_ratio(0.01), 1.743696433594053, 1e-13);
  EXPECT_NEAR(single_point_ratio(kFixedPoint), 1.0, 1e-12);
  EXPECT_THROW(ratio_f(0.0, 0.0), DomainError);
  EXPECT_THROW(ratio_f(1.0, 1.0), DomainError);
  EXPECT_THROW(ratio_g(0.0), DomainError);
  EXPECT_THROW(ratio_f(-0.5, 0.1), DomainError);
}

TEST(Ratios, MatchOracle) {
  for (double p = 0.0005; p < 0.1; p += 0.0037) {
    for (double q = 0.0; q < 0.1; q += 0.0041) {
      const double expected = 2 * oracle::h2(p + q - p * q) / (oracle::h2(p) + oracle::h2(q));
      EXPECT_NEAR(ratio_f(p, q), expected, 1e-12);
      EXPECT_NEAR(ratio_f(p, q), ratio_f(q, p), 1e-14);
    }
  }
}

TEST(ScanL1, MinimumAtCorner) {
  const auto scan = scan_lemma_l1(1e-3);
  EXPECT_EQ(scan.violations, 0u);
  EXPECT_EQ(scan.chained_violations, 0u);
  EXPECT_NEAR(scan.refined_min.value, 1.495688807042833, 1e-9);
  EXPECT_NEAR(scan.refined_min.p, 0.1, 1e-3);
  EXPECT_NEAR(scan.refined_min.p2, 0.1, 1e-3);
  EXPECT_GE(scan.chained_min_margin, -1e-9);
  EXPECT_EQ(to_report(scan).verdict(), Verdict::kPass);
  EXPECT_THROW(scan_lemma_l1(0.0), DomainError);
  EXPECT_THROW(scan_lemma_l1(0.5), DomainError);
}

TEST(ScanL1, JobsDoNotChangeResult) {
  const auto a = scan_lemma_l1(4e-3, 1);
  const auto b = scan_lemma_l1(4e-3, 3);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.refined_min.value, b.refined_min.value);
  EXPECT_EQ(a.chained_min_margin, b.chained_min_margin);
}

TEST(ScanL2, ConcavityBound) {
  const auto scan = scan_lemma_l2(1e-2);
  EXPECT_EQ(scan.violations, 0u);
  EXPECT_GE(scan.min_margin.value, -1e-12);
  EXPECT_LE(scan.edge_max_abs, 1e-12);
  EXPECT_EQ(to_report(scan).verdict(), Verdict::kPass);
}

TEST(Instance, PairwiseEntropyMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = random_instance(1 + seed % 40, 0.01, seed, static_cast<InstanceProfile>(seed % 3));
    std::vector<std::pair<double, double>> qp;
    for (const auto& e : inst.entries()) qp.emplace_back(e.weight, e.p);
    EXPECT_NEAR(pairwise_union_entropy(inst), oracle::pair_entropy(qp), 1e-12);
    EXPECT_TRUE(inst.hypothesis_ok()) << inst.mean_p();
  }
}

TEST(Instance, Validation) {
  EXPECT_THROW(LemmaInstance({{1.0, 1.5}}), DomainError);
  EXPECT_THROW(LemmaInstance(std::vector<LemmaEntry>{}), UsageError);
  LemmaInstance inst({{2.0, 0.01}, {2.0, 0.0}});
  EXPECT_NEAR(inst.residual(), 3.0, 1e-15);
  EXPECT_NEAR(inst.mean_p(), 0.005, 1e-15);
  EXPECT_NEAR(inst.conditional_entropy(), 0.5 * oracle::h2(0.01), 1e-15);
}

TEST(Decomposition, SinglePoint) {
  const auto d = verify_instance(LemmaInstance({{1.0, 0.01}}));
  EXPECT_NEAR(d.observed_ratio(), 1.743696433594053, 1e-12);
  EXPECT_NEAR(d.pr_c0, 1.0, 1e-15);
  EXPECT_EQ(to_report(d).verdict(), Verdict::kPass);
}

TEST(Decomposition, BlocksAndMargins) {
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    const auto inst = random_instance(1 + seed % 64, 0.01, seed, static_cast<InstanceProfile>(seed % 3));
    const auto d = verify_instance(inst);
    EXPECT_LE(std::abs(d.decomposition_residual), 1e-12);
    EXPECT_LE(std::abs(d.split_residual), 1e-12);
    EXPECT_GE(d.markov_margin, -1e-12);
    EXPECT_GE(d.low_low_margin, -1e-9);
    EXPECT_GE(d.mixed_margin, -1e-9);
    EXPECT_GE(d.main_margin, -1e-9);
    EXPECT_GE(d.term_11, 0.0);
  }
}

TEST(Decomposition, HypothesisViolationNotFailure) {
  const auto d = verify_instance(LemmaInstance({{1.0, 0.3}}));
  EXPECT_FALSE(d.hypothesis_ok);
  EXPECT_EQ(to_report(d).verdict(), Verdict::kHypothesisViolation);
}

TEST(Profiles, Names) {
  for (auto p : {InstanceProfile::kSmooth, InstanceProfile::kSpiky, InstanceProfile::kBoundary}) {
    EXPECT_EQ(parse_profile(to_string(p)), p);
  }
  EXPECT_THROW(parse_profile("lumpy"), UsageError);
}

TEST(Minimize, SeededAndAboveBound) {
  MinimizeOptions o;
  o.iters = 1500;
  o.restarts = 3;
  o.seed = 9;
  const auto a = adversarial_minimize(o);
  o.jobs = 2;
  const auto b = adversarial_minimize(o);
  EXPECT_EQ(a.min_ratio, b.min_ratio);
  EXPECT_EQ(a.restart_ratios, b.restart_ratios);
  EXPECT_FALSE(a.critical);
  EXPECT_GE(a.min_ratio, 1.26);
  EXPECT_TRUE(a.best.hypothesis_ok());
}

TEST(RatioGrid, GridAndCsv) {
  const auto rows = figure1_grid(1e-2);
  ASSERT_FALSE(rows.empty());
  const auto m = grid_minimum(rows);
  EXPECT_NEAR(m.value, 1.495688807042833, 1e-12);
  EXPECT_DOUBLE_EQ(m.p, 0.1);
  EXPECT_DOUBLE_EQ(m.p2, 0.1);
  std::ostringstream os;
  write_grid_csv(os, rows);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "p,p_prime,f");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), rows.size() + 1);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
}
