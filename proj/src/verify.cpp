#include "pbo/verify.hpp"

#include <algorithm>
#include <cmath>

#include "pbo/root_finding.hpp"

namespace pbo {

PandoraInstance random_finite_instance(std::mt19937_64& rng, int max_boxes, int max_atoms) {
  std::uniform_int_distribution<int> n_boxes_dist(2, max_boxes);
  std::uniform_int_distribution<int> n_atoms_dist(1, max_atoms);
  std::uniform_real_distribution<double> value_dist(0.0, 3.0);
  std::uniform_real_distribution<double> cost_dist(0.05, 2.0);
  std::uniform_real_distribution<double> weight_dist(0.1, 1.0);

  PandoraInstance instance;
  const int n = n_boxes_dist(rng);
  for (int j = 0; j < n; ++j) {
    const int k = n_atoms_dist(rng);
    std::vector<Atom> atoms(k);
    double total = 0.0;
    for (Atom& a : atoms) {
      a.value = value_dist(rng);
      a.probability = weight_dist(rng);
      total += a.probability;
    }
    double assigned = 0.0;
    for (int i = 0; i < k - 1; ++i) {
      atoms[i].probability /= total;
      assigned += atoms[i].probability;
    }
    atoms[k - 1].probability = 1.0 - assigned;
    PandoraBox box;
    box.id = j;
    box.reward = RewardDistribution::finite(std::move(atoms));
    box.cost = cost_dist(rng);
    instance.boxes.push_back(std::move(box));
  }
  return instance;
}

OptimalityReport run_optimality_suite(int n_instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  OptimalityReport report;
  for (int i = 0; i < n_instances; ++i) {
    const PandoraInstance instance = random_finite_instance(rng);
    const double optimal = brute_force_value(instance);
    InstanceResidual row;
    row.instance = i;
    row.residual_stop_early =
        std::abs(evaluate_gittins_policy(instance, TieRule::stop_early).net_value - optimal);
    row.residual_open_on_tie =
        std::abs(evaluate_gittins_policy(instance, TieRule::open_on_tie).net_value - optimal);
    report.max_residual =
        std::max({report.max_residual, row.residual_stop_early, row.residual_open_on_tie});
    report.residuals.push_back(row);
  }
  report.pass = report.max_residual <= 1e-9;
  return report;
}

BudgetSuiteReport run_budget_suite(int n_instances, std::uint64_t seed, bool swap_tie_rules) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> budget_frac(0.1, 0.9);

  BudgetSuiteReport report;
  report.pass = true;
  int made = 0;
  int guard = 0;
  while (made < n_instances && ++guard < 100 * n_instances) {
    PandoraInstance instance = random_finite_instance(rng);

    // An actively binding budget must sit below the minimum spend among
    // optimal policies at lambda -> 0+, which the stop-early Gittins policy
    // attains in that limit.
    const double min_spend_free = evaluate_gittins_policy(instance, TieRule::stop_early, 1e-9).expected_spend;
    const double min_cost = instance.min_cost();
    if (min_spend_free - min_cost < 1e-3) continue;
    const double budget = min_cost + budget_frac(rng) * (min_spend_free - min_cost);
    instance.budget = budget;
    const auto dual = [&](double l) { return lagrangian_value(instance, l); };

    BudgetCaseResult result;
    result.instance = made;
    result.budget = budget;
    try {
      if (swap_tie_rules) {
        // Negative control: miswire pi_minus/pi_plus and redo the bracket
        // check by hand.
        double lambda_hi = 1.0;
        while (dual(2.0 * lambda_hi) <= dual(lambda_hi)) lambda_hi *= 2.0;
        const double lambda_star = golden_section_min(dual, 1e-6, 2.0 * lambda_hi, 1e-10);
        const PolicyOutcome wrong_minus =
            evaluate_gittins_policy(instance, TieRule::open_on_tie, lambda_star, 1e-5);
        const PolicyOutcome wrong_plus =
            evaluate_gittins_policy(instance, TieRule::stop_early, lambda_star, 1e-5);
        result.lambda_star = lambda_star;
        result.lambda_positive = lambda_star > 1e-5;
        result.bracket_ok = wrong_minus.expected_spend <= budget + 1e-7 &&
                            budget <= wrong_plus.expected_spend + 1e-7;
        result.convexity_ok = true;
        if (!result.bracket_ok) {
          result.note = "tie-rule mismatch detected";
          report.pass = false;
        }
      } else {
        const MixedBudgetPolicy mixed = budget_lambda(instance, budget);
        result.lambda_star = mixed.lambda_star;
        result.lambda_positive = mixed.lambda_star > 1e-5;
        result.bracket_ok = mixed.spend_minus <= budget + 1e-7 && budget <= mixed.spend_plus + 1e-7;
        result.spend_residual = std::abs(mixed.expected_spend - budget);
        result.value_residual = std::abs(mixed.expected_value - mixed.lagrangian_min);

        result.convexity_ok = true;
        const double probes[3][2] = {{1e-6, mixed.lambda_star},
                                     {mixed.lambda_star, 2.0 * mixed.lambda_star + 1.0},
                                     {0.3 * mixed.lambda_star, 1.7 * mixed.lambda_star}};
        for (const auto& pair : probes) {
          const double a = dual(pair[0]);
          const double b = dual(pair[1]);
          const double mid = dual(0.5 * (pair[0] + pair[1]));
          if (mid > 0.5 * (a + b) + 1e-9) result.convexity_ok = false;
        }

        const bool case_pass = result.lambda_positive && result.bracket_ok &&
                               result.convexity_ok && result.spend_residual <= 1e-6 &&
                               result.value_residual <= 1e-6;
        if (!case_pass) report.pass = false;
      }
    } catch (const std::exception& e) {
      result.note = e.what();
      report.pass = false;
    }
    report.cases.push_back(std::move(result));
    ++made;
  }
  if (made < n_instances) report.pass = false;
  return report;
}

}  // namespace pbo
