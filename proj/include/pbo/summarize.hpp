#pragma once

#include <map>
#include <string>
#include <vector>

#include "pbo/experiment.hpp"

namespace pbo {

struct AlignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SummaryRow {
  std::string policy;
  double cumulative_cost = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

/// Linear-interpolation quantile (the midpoint convention for even sizes).
double quantile(std::vector<double> values, double p);

/// Aligns per-seed regret traces of each policy on a common cumulative-cost
/// grid by last-observation-carried-forward and reports median and
/// quartiles per grid point. All policies must share the same seed set.
std::vector<SummaryRow> summarize_regret(
    const std::map<std::string, std::vector<std::vector<RegretRecord>>>& per_policy);

std::string summary_to_csv(const std::vector<SummaryRow>& rows);

}  // namespace pbo
