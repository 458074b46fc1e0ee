#include "pbo/reward.hpp"

#include <algorithm>
#include <cmath>

#include "pbo/math_util.hpp"

namespace pbo {

RewardDistribution RewardDistribution::gaussian(double mean, double std) {
  if (!(std > 0.0)) throw std::invalid_argument("RewardDistribution: Gaussian std must be positive");
  RewardDistribution d;
  d.is_gaussian_ = true;
  d.mean_ = mean;
  d.std_ = std;
  return d;
}

RewardDistribution RewardDistribution::finite(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("RewardDistribution: empty support");
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (a.probability < 0.0) throw std::invalid_argument("RewardDistribution: negative probability");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("RewardDistribution: probabilities must sum to 1");
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  RewardDistribution d;
  d.is_gaussian_ = false;
  d.atoms_ = std::move(atoms);
  return d;
}

double RewardDistribution::mean() const {
  if (is_gaussian_) return mean_;
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.value * a.probability;
  return m;
}

double RewardDistribution::support_min() const {
  if (is_gaussian_) throw std::logic_error("support_min: Gaussian rewards have unbounded support");
  return atoms_.front().value;
}

double RewardDistribution::support_max() const {
  if (is_gaussian_) throw std::logic_error("support_max: Gaussian rewards have unbounded support");
  return atoms_.back().value;
}

double RewardDistribution::expected_improvement(double y) const {
  if (is_gaussian_) return gaussian_ei(mean_, std_, y);
  double acc = 0.0;
  for (const Atom& a : atoms_) acc += a.probability * std::max(a.value - y, 0.0);
  return acc;
}

double RewardDistribution::prob_greater(double y, double tol) const {
  if (is_gaussian_) return 1.0 - normal_cdf((y - mean_) / std_);
  double p = 0.0;
  for (const Atom& a : atoms_)
    if (a.value > y + tol) p += a.probability;
  return p;
}

double RewardDistribution::prob_geq(double y, double tol) const {
  if (is_gaussian_) return 1.0 - normal_cdf((y - mean_) / std_);
  double p = 0.0;
  for (const Atom& a : atoms_)
    if (a.value >= y - tol) p += a.probability;
  return p;
}

double expected_improvement_dist(const RewardDistribution& dist, double y) {
  return dist.expected_improvement(y);
}

}  // namespace pbo
