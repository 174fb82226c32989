#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "uclab/conjecture_lab.hpp"
#include "uclab/errors.hpp"

using namespace uclab;

namespace {

oracle::Law to_law(const SubsetDistribution& d) {
  oracle::Law law;
  for (const auto& e : d.entries()) law[e.mask] = e.mass;
  return law;
}

}  // namespace

TEST(Gap, TwoPoint) {
  // A in {empty, [n]}: A u B is two-point with 2p - p^2 = 0.4375.
  const auto g = conjecture1_gap(two_point(3, 0.25));
  EXPECT_NEAR(g.kl, 0.119759185055852, 1e-13);
  EXPECT_NEAR(g.gap, 0.297180468885217, 1e-13);
  EXPECT_TRUE(g.hypothesis_ok);
}

TEST(Gap, MatchesOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto f = random_union_closed(6, 3, seed);
    // Uneven weights on a closed family.
    std::vector<SubsetDistribution::Entry> pairs;
    for (Mask m : f.members()) pairs.push_back({m, 1.0 + static_cast<double>(m % 7)});
    const auto dist = make_distribution(6, pairs);
    const auto law = to_law(dist);
    const auto u = oracle::union_law(law);
    const auto g = conjecture1_gap(dist);
    EXPECT_NEAR(g.gap, oracle::shannon(u) + oracle::kl(u, law) - oracle::shannon(law), 1e-12);
  }
}

TEST(Gap, InfiniteOffClosedSupport) {
  const auto g = conjecture1_gap(make_distribution(2, {{1, 0.5}, {2, 0.5}}));
  EXPECT_EQ(g.kl, kInf);
  EXPECT_EQ(g.gap, kInf);
}

TEST(KlIdentity, ClosedFamilies) {
  for (int n = 1; n <= 3; ++n) {
    for (const auto& f : enumerate_union_closed(n)) {
      EXPECT_EQ(kl_identity_check(f).verdict(), Verdict::kPass);
    }
  }
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    EXPECT_EQ(kl_identity_check(random_union_closed(10, 4, seed)).verdict(), Verdict::kPass);
  }
}

TEST(KlIdentity, RejectsOpenFamilyWithWitness) {
  try {
    kl_identity_check(SetFamily(2, {1, 2}));
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("1 u 2"), std::string::npos) << e.what();
  }
}

TEST(Search, SeededAndConstrained) {
  SearchOptions o;
  o.n = 4;
  o.iters = 600;
  o.restarts = 3;
  o.seed = 5;
  const auto a = search_conjecture1(o);
  o.jobs = 3;
  const auto b = search_conjecture1(o);
  EXPECT_EQ(a.restart_gaps, b.restart_gaps);
  ASSERT_TRUE(std::isfinite(a.best.gap));
  EXPECT_TRUE(a.best.hypothesis_ok);
  EXPECT_LT(a.best.marginal_max, 0.5);
  EXPECT_LE(a.witness.support_size(), o.support_size);
  // The reported gap belongs to the reported witness.
  const auto law = to_law(a.witness);
  const auto u = oracle::union_law(law);
  EXPECT_NEAR(a.best.gap, oracle::shannon(u) + oracle::kl(u, law) - oracle::shannon(law), 1e-12);
  EXPECT_THROW(search_conjecture1(SearchOptions{13}), UsageError);
}

TEST(ParityCounterexample, ParityConstruction) {
  const auto r = section4_counterexample();
  EXPECT_NEAR(r.h_f_xx, 2.0, 1e-12);
  EXPECT_NEAR(r.h_x, 2.0, 1e-12);
  EXPECT_NEAR(r.h_x_given_c, 1.0, 1e-12);
  EXPECT_NEAR(r.h_f_given_cc, 0.0, 1e-12);
}
