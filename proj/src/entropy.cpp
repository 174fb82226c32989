#include "uclab/entropy.hpp"

#include <algorithm>
#include <map>
#include <numbers>
#include <string>

#include "uclab/errors.hpp"

namespace uclab {

namespace {

constexpr long double kInvLn2 = 1.0L / std::numbers::ln2_v<long double>;

// -m log2 m, with 0 log 0 = 0.
long double neg_m_log_m(long double m) {
  if (m <= 0.0L) return 0.0L;
  return -m * std::log2(m);
}

// H(p) for p <= 1/2. The (1-p) log(1-p) term goes through log1p.
long double low_half_entropy(long double p) {
  if (p <= 0.0L) return 0.0L;
  const long double a = -p * std::log2(p);
  const long double b = -(1.0L - p) * std::log1p(-p) * kInvLn2;
  return a + b;
}

double normalize_in_place(std::vector<double*>& masses) {
  long double total = 0.0L;
  for (double* m : masses) total += *m;
  if (!(total > 0.0L)) throw UsageError("distribution has zero total mass");
  for (double* m : masses) *m = static_cast<double>(*m / total);
  return static_cast<double>(total - 1.0L);
}

}  // namespace

double checked_prob(double p) {
  if (std::isnan(p) || p < -kProbSlack || p > 1.0 + kProbSlack) {
    throw DomainError("probability out of range: " + std::to_string(p));
  }
  return std::clamp(p, 0.0, 1.0);
}

Prob::Prob(double value) : value_(checked_prob(value)) {}

double binary_entropy_unchecked(double p) noexcept {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  if (p <= 0.5) return static_cast<double>(low_half_entropy(p));
  // 1 - p is exact for p in [1/2, 1].
  return static_cast<double>(low_half_entropy(1.0L - static_cast<long double>(p)));
}

double binary_entropy(double p) { return binary_entropy_unchecked(checked_prob(p)); }

double union_prob(double p, double p2) {
  p = checked_prob(p);
  p2 = checked_prob(p2);
  return p + p2 - p * p2;
}

double entropy_of_masses(const std::vector<double>& masses) {
  long double h = 0.0L;
  for (double m : masses) h += neg_m_log_m(m);
  return static_cast<double>(std::max(h, 0.0L));
}

// ---------------------------------------------------------------------------

FiniteDistribution::FiniteDistribution(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw UsageError("empty distribution");
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.label < b.label; });
  std::vector<double*> masses;
  masses.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && entries_[i].label == entries_[i - 1].label) {
      throw UsageError("duplicate label " + std::to_string(entries_[i].label));
    }
    if (entries_[i].mass < -kProbSlack) throw DomainError("negative mass");
    entries_[i].mass = std::max(entries_[i].mass, 0.0);
    masses.push_back(&entries_[i].mass);
  }
  residual_ = normalize_in_place(masses);
}

double FiniteDistribution::mass_of(Label label) const noexcept {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), label,
                             [](const Entry& e, Label l) { return e.label < l; });
  return (it != entries_.end() && it->label == label) ? it->mass : 0.0;
}

FiniteDistribution FiniteDistribution::uniform(std::size_t count) {
  std::vector<Entry> entries;
  entries.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    entries.push_back({static_cast<Label>(i), 1.0 / static_cast<double>(count)});
  }
  return FiniteDistribution(std::move(entries));
}

JointDistribution::JointDistribution(std::vector<Cell> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) throw UsageError("empty joint distribution");
  std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  std::vector<double*> masses;
  masses.reserve(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (i > 0 && cells_[i].x == cells_[i - 1].x && cells_[i].y == cells_[i - 1].y) {
      throw UsageError("duplicate (x, y) cell");
    }
    if (cells_[i].mass < -kProbSlack) throw DomainError("negative mass");
    cells_[i].mass = std::max(cells_[i].mass, 0.0);
    masses.push_back(&cells_[i].mass);
  }
  residual_ = normalize_in_place(masses);
}

FiniteDistribution JointDistribution::marginal_x() const {
  std::map<Label, long double> acc;
  for (const Cell& c : cells_) acc[c.x] += c.mass;
  std::vector<FiniteDistribution::Entry> entries;
  for (const auto& [label, mass] : acc) entries.push_back({label, static_cast<double>(mass)});
  return FiniteDistribution(std::move(entries));
}

FiniteDistribution JointDistribution::marginal_y() const {
  std::map<Label, long double> acc;
  for (const Cell& c : cells_) acc[c.y] += c.mass;
  std::vector<FiniteDistribution::Entry> entries;
  for (const auto& [label, mass] : acc) entries.push_back({label, static_cast<double>(mass)});
  return FiniteDistribution(std::move(entries));
}

JointDistribution JointDistribution::product(const FiniteDistribution& x,
                                             const FiniteDistribution& y) {
  std::vector<Cell> cells;
  cells.reserve(x.size() * y.size());
  for (const auto& ex : x.entries()) {
    for (const auto& ey : y.entries()) cells.push_back({ex.label, ey.label, ex.mass * ey.mass});
  }
  return JointDistribution(std::move(cells));
}

// ---------------------------------------------------------------------------

double entropy(const FiniteDistribution& d) {
  long double h = 0.0L;
  for (const auto& e : d.entries()) h += neg_m_log_m(e.mass);
  return static_cast<double>(std::max(h, 0.0L));
}

double kl_divergence(const FiniteDistribution& p, const FiniteDistribution& q) {
  const auto& pe = p.entries();
  const auto& qe = q.entries();
  if (pe.size() != qe.size()) throw UsageError("kl_divergence: label spaces differ in size");
  long double d = 0.0L;
  for (std::size_t i = 0; i < pe.size(); ++i) {
    if (pe[i].label != qe[i].label) throw UsageError("kl_divergence: label spaces differ");
    const long double pm = pe[i].mass;
    if (pm <= 0.0L) continue;
    const long double qm = qe[i].mass;
    if (qm <= 0.0L) return kInf;
    d += pm * std::log2(pm / qm);
  }
  return static_cast<double>(d);
}

double joint_entropy(const JointDistribution& j) {
  long double h = 0.0L;
  for (const auto& c : j.cells()) h += neg_m_log_m(c.mass);
  return static_cast<double>(std::max(h, 0.0L));
}

double conditional_entropy(const JointDistribution& j) {
  // Group cells by y; within each group H(X | Y = y) from the normalized column.
  std::map<Label, std::vector<double>> columns;
  for (const auto& c : j.cells()) columns[c.y].push_back(c.mass);
  long double h = 0.0L;
  for (const auto& [y, masses] : columns) {
    long double py = 0.0L;
    for (double m : masses) py += m;
    if (py <= 0.0L) continue;
    long double hy = 0.0L;
    for (double m : masses) hy += neg_m_log_m(m / py);
    h += py * hy;
  }
  return static_cast<double>(std::max(h, 0.0L));
}

JointDistribution map_condition(const JointDistribution& j, const LabelMap& f) {
  std::map<std::pair<Label, Label>, long double> acc;
  for (const auto& c : j.cells()) acc[{c.x, f(c.y)}] += c.mass;
  std::vector<JointDistribution::Cell> cells;
  cells.reserve(acc.size());
  for (const auto& [key, mass] : acc) cells.push_back({key.first, key.second, static_cast<double>(mass)});
  return JointDistribution(std::move(cells));
}

JointDistribution transpose(const JointDistribution& j) {
  std::vector<JointDistribution::Cell> cells;
  cells.reserve(j.cells().size());
  for (const auto& c : j.cells()) cells.push_back({c.y, c.x, c.mass});
  return JointDistribution(std::move(cells));
}

}  // namespace uclab
