#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pbo/pandora.hpp"

namespace pbo {

/// Random finite-support instance: up to `max_boxes` boxes with up to
/// `max_atoms` atoms each, values in [0, 3], costs in [0.05, 2].
PandoraInstance random_finite_instance(std::mt19937_64& rng, int max_boxes = 4, int max_atoms = 3);

struct InstanceResidual {
  int instance = 0;
  double residual_stop_early = 0.0;
  double residual_open_on_tie = 0.0;
};

struct OptimalityReport {
  std::vector<InstanceResidual> residuals;
  double max_residual = 0.0;
  bool pass = false;  // max residual <= 1e-9
};

/// Gittins-policy exact value vs the backward-induction optimum on random
/// instances, for both tie rules.
OptimalityReport run_optimality_suite(int n_instances, std::uint64_t seed);

struct BudgetCaseResult {
  int instance = 0;
  double budget = 0.0;
  double lambda_star = 0.0;
  double spend_residual = 0.0;    // |mixture spend - B|
  double value_residual = 0.0;    // |mixture value - min_lambda A|
  bool convexity_ok = false;
  bool lambda_positive = false;
  bool bracket_ok = false;
  std::string note;
};

struct BudgetSuiteReport {
  std::vector<BudgetCaseResult> cases;
  bool pass = false;
};

/// Budget-constrained construction checks on random instances with an
/// actively binding budget: lambda* strictly interior, midpoint convexity
/// of the dual, mixture spend equal to B, and the mixture value equal to
/// the dual minimum. `swap_tie_rules` deliberately miswires the two
/// tie-rule variants (negative control); a healthy suite detects it.
BudgetSuiteReport run_budget_suite(int n_instances, std::uint64_t seed, bool swap_tie_rules = false);

}  // namespace pbo
