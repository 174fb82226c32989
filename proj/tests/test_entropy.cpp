#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uclab/entropy.hpp"
#include "uclab/errors.hpp"
#include "uclab/rng.hpp"

using namespace uclab;

// Reference values computed with 50-digit mpmath and frozen here.
TEST(BinaryEntropy, FrozenValues) {
  EXPECT_NEAR(binary_entropy(0.1), 0.468995593589281, 1e-15);
  EXPECT_NEAR(binary_entropy(0.19), 0.701471459883897, 1e-15);
  EXPECT_NEAR(binary_entropy(kFixedPoint), 0.959418728222744, 1e-12);
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
}

TEST(BinaryEntropy, FixedPointOfUnion) {
  // H(2p - p^2) = H(p) at p = (3 - sqrt 5)/2 because 2p - p^2 = 1 - p there.
  const double p = kFixedPoint;
  EXPECT_NEAR(2 * p - p * p, 1 - p, 1e-15);
  EXPECT_NEAR(binary_entropy(union_prob(p, p)), binary_entropy(p), 1e-14);
}

TEST(BinaryEntropy, SymmetryAndConcavity) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    const double p = u(gen);
    const double q = u(gen);
    EXPECT_NEAR(binary_entropy(p), binary_entropy(1 - p), 1e-12);
    EXPECT_GE(binary_entropy(0.5 * (p + q)) + 1e-12, 0.5 * (binary_entropy(p) + binary_entropy(q)));
    EXPECT_NEAR(binary_entropy(p), oracle::h2(p), 1e-12);
  }
}

TEST(BinaryEntropy, TinyArgumentsKeepRelativeAccuracy) {
  // H(p) ~ p log2(e/p) for small p.
  for (double p : {1e-10, 1e-14, 1e-300}) {
    const double approx = p * (std::log2(1.0 / p) + 1.0 / std::log(2.0));
    EXPECT_NEAR(binary_entropy(p) / approx, 1.0, 1e-6) << p;
  }
}

TEST(BinaryEntropy, Domain) {
  EXPECT_THROW(binary_entropy(-0.1), DomainError);
  EXPECT_THROW(binary_entropy(1.5), DomainError);
  EXPECT_THROW(binary_entropy(std::nan("")), DomainError);
  EXPECT_EQ(binary_entropy(-1e-13), 0.0);
  EXPECT_EQ(binary_entropy(1.0 + 1e-13), 0.0);
  EXPECT_THROW(Prob(2.0), DomainError);
  EXPECT_DOUBLE_EQ(Prob(0.25).value(), 0.25);
}

TEST(FiniteDistributionTest, RenormalizesAndReportsResidual) {
  FiniteDistribution d({{3, 2.0}, {1, 2.0}});
  EXPECT_NEAR(d.residual(), 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(d.mass_of(1), 0.5);
  EXPECT_EQ(d.mass_of(2), 0.0);
  EXPECT_EQ(d.entries().front().label, 1);
  EXPECT_DOUBLE_EQ(entropy(d), 1.0);
  EXPECT_THROW(FiniteDistribution({{1, 0.5}, {1, 0.5}}), UsageError);
  EXPECT_THROW(FiniteDistribution({{1, -0.5}, {2, 1.5}}), DomainError);
  EXPECT_THROW(FiniteDistribution({{1, 0.0}}), UsageError);
  EXPECT_NEAR(entropy(FiniteDistribution::uniform(8)), 3.0, 1e-15);
}

TEST(KlDivergence, Values) {
  FiniteDistribution p({{0, 1 - 0.4375}, {1, 0.4375}});
  FiniteDistribution q({{0, 0.75}, {1, 0.25}});
  EXPECT_NEAR(kl_divergence(p, q), 0.119759185055852, 1e-14);
  EXPECT_EQ(kl_divergence(p, p), 0.0);

  FiniteDistribution escape({{0, 0.5}, {1, 0.5}});
  FiniteDistribution point({{0, 1.0}, {1, 0.0}});
  EXPECT_EQ(kl_divergence(escape, point), kInf);
  EXPECT_NEAR(kl_divergence(point, escape), 1.0, 1e-15);

  FiniteDistribution other({{0, 0.5}, {2, 0.5}});
  EXPECT_THROW(kl_divergence(escape, other), UsageError);
}

TEST(KlDivergence, GibbsInequality) {
  Rng rng(11);
  for (int k = 0; k < 2000; ++k) {
    const std::size_t size = 1 + rng.below(10);
    std::vector<FiniteDistribution::Entry> a, b;
    for (std::size_t i = 0; i < size; ++i) {
      a.push_back({static_cast<Label>(i), rng.exponential()});
      b.push_back({static_cast<Label>(i), rng.exponential()});
    }
    EXPECT_GE(kl_divergence(FiniteDistribution(a), FiniteDistribution(b)), -1e-12);
  }
}

namespace {

JointDistribution random_joint(Rng& rng) {
  std::vector<JointDistribution::Cell> cells;
  const Label xs = 1 + static_cast<Label>(rng.below(6));
  const Label ys = 1 + static_cast<Label>(rng.below(8));
  for (Label x = 0; x < xs; ++x) {
    for (Label y = 0; y < ys; ++y) {
      if (rng.bernoulli(0.3)) continue;
      cells.push_back({x, y, rng.exponential()});
    }
  }
  if (cells.empty()) cells.push_back({0, 0, 1.0});
  return JointDistribution(cells);
}

}  // namespace

TEST(JointDistributionTest, ChainRuleAndDataProcessing) {
  Rng rng(23);
  for (int k = 0; k < 3000; ++k) {
    const auto j = random_joint(rng);
    const double hxy = joint_entropy(j);
    EXPECT_NEAR(hxy, entropy(j.marginal_y()) + conditional_entropy(j), 1e-9);
    EXPECT_NEAR(hxy, entropy(j.marginal_x()) + conditional_entropy(transpose(j)), 1e-9);
    EXPECT_LE(conditional_entropy(j), entropy(j.marginal_x()) + 1e-12);

    const Label buckets = 1 + static_cast<Label>(rng.below(3));
    const auto coarse = map_condition(j, [buckets](Label y) { return y % buckets; });
    EXPECT_LE(conditional_entropy(j), conditional_entropy(coarse) + 1e-12);
    EXPECT_NEAR(entropy(coarse.marginal_x()), entropy(j.marginal_x()), 1e-12);
  }
}

TEST(JointDistributionTest, ProductIsIndependent) {
  FiniteDistribution x({{0, 0.3}, {1, 0.7}});
  FiniteDistribution y({{5, 0.5}, {6, 0.25}, {7, 0.25}});
  const auto j = JointDistribution::product(x, y);
  EXPECT_NEAR(conditional_entropy(j), entropy(x), 1e-14);
  EXPECT_NEAR(joint_entropy(j), entropy(x) + 1.5, 1e-14);
}

TEST(JointDistributionTest, ParityJoint) {
  // C uniform on {0..3}; X uniform on the two values sharing C's parity.
  std::vector<JointDistribution::Cell> cells;
  for (Label c = 0; c < 4; ++c) {
    for (Label x = c % 2; x < 4; x += 2) cells.push_back({x, c, 0.125});
  }
  const JointDistribution j(cells);
  EXPECT_NEAR(entropy(j.marginal_x()), 2.0, 1e-15);
  EXPECT_NEAR(conditional_entropy(j), 1.0, 1e-15);
  // Coarsening C to its parity loses nothing about X here.
  const auto parity = map_condition(j, [](Label c) { return c % 2; });
  EXPECT_NEAR(conditional_entropy(parity), 1.0, 1e-15);
  EXPECT_GE(conditional_entropy(parity), conditional_entropy(j) - 1e-15);
  // Forgetting C altogether.
  const auto constant = map_condition(j, [](Label) { return 0; });
  EXPECT_NEAR(conditional_entropy(constant), 2.0, 1e-15);
}

TEST(EntropyOfMasses, SkipsZeros) {
  EXPECT_NEAR(entropy_of_masses({0.5, 0.0, 0.25, 0.25}), 1.5, 1e-15);
  EXPECT_EQ(entropy_of_masses({1.0}), 0.0);
}
