#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace pbo {

struct Atom {
  double value = 0.0;
  double probability = 0.0;
};

/// Reward model of a single box: either Gaussian(mean, std) or a finite
/// list of (value, probability) atoms summing to one.
class RewardDistribution {
 public:
  static RewardDistribution gaussian(double mean, double std);
  static RewardDistribution finite(std::vector<Atom> atoms);

  bool is_gaussian() const { return is_gaussian_; }
  double gaussian_mean() const { return mean_; }
  double gaussian_std() const { return std_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  double mean() const;
  double support_min() const;  // finite only
  double support_max() const;  // finite only

  /// E max(0, f - y).
  double expected_improvement(double y) const;

  /// P(f > y) and P(f >= y) with a tolerance band around y (finite only;
  /// atoms within `tol` of y count as equal).
  double prob_greater(double y, double tol = 0.0) const;
  double prob_geq(double y, double tol = 0.0) const;

 private:
  bool is_gaussian_ = true;
  double mean_ = 0.0;
  double std_ = 1.0;
  std::vector<Atom> atoms_;
};

/// E max(0, f - y) for any reward distribution; Gaussian rewards use the
/// closed form, finite rewards the direct sum.
double expected_improvement_dist(const RewardDistribution& dist, double y);

}  // namespace pbo
