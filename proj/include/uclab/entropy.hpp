#pragma once

// Scalar entropy kernels and information measures over finite distributions.
// All logarithms are base 2 and 0 * log 0 is taken as 0.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace uclab {

/// Slack accepted around [0, 1] before a probability is rejected.
inline constexpr double kProbSlack = 1e-12;
/// Allowed deviation of a total mass from 1 before renormalization is reported.
inline constexpr double kNormTolerance = 1e-9;

/// Frequency bound of the main theorem.
inline constexpr double kDefaultMu = 0.01;
/// Split point between low- and high-probability histories.
inline constexpr double kDefaultThreshold = 0.1;
/// Entropy growth factor guaranteed under the mu bound.
inline constexpr double kDefaultRatio = 1.26;

/// The fixed point of p -> 2p - p^2 under H, i.e. (3 - sqrt 5) / 2.
inline const double kFixedPoint = (3.0 - std::sqrt(5.0)) / 2.0;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A probability in [0, 1]. Values within kProbSlack outside the interval are
/// clamped; anything further out throws DomainError.
class Prob {
 public:
  constexpr Prob() = default;
  explicit Prob(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

 private:
  double value_ = 0.0;
};

/// Validates and clamps p into [0, 1].
double checked_prob(double p);

/// H(p) = -p log p - (1-p) log (1-p). Throws DomainError outside [0, 1].
double binary_entropy(double p);

/// Unchecked kernel for hot loops; p must already lie in [0, 1].
double binary_entropy_unchecked(double p) noexcept;

/// Pr[X or X'] for independent bits with the given probabilities.
double union_prob(double p, double p2);

using Label = std::int64_t;

class FiniteDistribution {
 public:
  struct Entry {
    Label label;
    double mass;
  };

  FiniteDistribution() = default;
  /// Renormalizes to unit mass. Labels must be distinct; zero masses are kept
  /// so that the label space can differ from the support.
  explicit FiniteDistribution(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  /// Total mass before renormalization, minus 1.
  double residual() const noexcept { return residual_; }
  double mass_of(Label label) const noexcept;

  static FiniteDistribution uniform(std::size_t count);

 private:
  std::vector<Entry> entries_;  // sorted by label
  double residual_ = 0.0;
};

class JointDistribution {
 public:
  struct Cell {
    Label x;
    Label y;
    double mass;
  };

  JointDistribution() = default;
  explicit JointDistribution(std::vector<Cell> cells);

  const std::vector<Cell>& cells() const noexcept { return cells_; }
  double residual() const noexcept { return residual_; }

  FiniteDistribution marginal_x() const;
  FiniteDistribution marginal_y() const;

  /// Independent product of two distributions.
  static JointDistribution product(const FiniteDistribution& x, const FiniteDistribution& y);

 private:
  std::vector<Cell> cells_;  // sorted by (x, y)
  double residual_ = 0.0;
};

double entropy(const FiniteDistribution& d);

/// D(p || q) in bits. Returns kInf when p puts mass where q has none.
/// Both distributions must list the same labels, else UsageError.
double kl_divergence(const FiniteDistribution& p, const FiniteDistribution& q);

/// H(X, Y).
double joint_entropy(const JointDistribution& j);

/// H(X | Y) computed as sum_y Pr[y] H(X | Y = y).
double conditional_entropy(const JointDistribution& j);

using LabelMap = std::function<Label(Label)>;

/// Joint of (X, f(Y)); masses of y-labels with the same image are summed.
JointDistribution map_condition(const JointDistribution& j, const LabelMap& f);

/// Joint of (Y, X): swaps the roles of the two coordinates.
JointDistribution transpose(const JointDistribution& j);

/// Entropy of an arbitrary nonnegative mass vector that sums to 1; zero entries
/// are skipped. Summation is in index order.
double entropy_of_masses(const std::vector<double>& masses);

}  // namespace uclab
