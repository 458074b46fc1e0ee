#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "pbo/errors.hpp"
#include "pbo/reward.hpp"

namespace pbo {

struct PandoraBox {
  int id = 0;
  RewardDistribution reward;
  double cost = 1.0;

  void validate() const {
    if (!(cost > 0.0)) throw std::invalid_argument("PandoraBox: cost must be positive");
  }
};

struct PandoraInstance {
  std::vector<PandoraBox> boxes;
  std::optional<double> budget;

  void validate() const;
  double min_cost() const;
  double total_cost() const;
  bool all_finite_support() const;
};

/// Gittins index (fair price): the unique g with E max(0, f - g) = cost.
/// For finite-support rewards with cost >= EI at the support minimum, the
/// root lies below the support on the linear tail EI(y) = E f - y and is
/// returned from that closed form. Solved by bracket expansion plus 100
/// bisection iterations; the residual satisfies |EI(g) - c| <= 1e-10 (1+c).
double gittins_index(const RewardDistribution& reward, double cost);
double gittins_index(const PandoraBox& box);

enum class TieRule { stop_early, open_on_tie };

struct PolicyTrace {
  std::vector<int> opened_ids;
  std::vector<double> realized_rewards;
  double total_cost = 0.0;
  double terminal_reward = 0.0;
  int stopping_step = 0;  // number of opened boxes T >= 1
};

/// One sampled rollout of the Gittins index policy: boxes are opened in
/// nonincreasing index order (ties by id) until the incumbent meets the top
/// remaining index (stop-early: >=, open-on-tie: >). At least one box is
/// always opened.
PolicyTrace run_gittins_policy(const PandoraInstance& instance, TieRule tie_rule, std::mt19937_64& rng);

/// Deterministic threshold policy: open boxes in a fixed order and, before
/// each opening after the first, stop when the incumbent passes the step's
/// threshold (>= when strict is false, > when true). The Gittins policy is
/// the special case where thresholds equal the Gittins indices.
struct ThresholdPolicy {
  std::vector<int> order;           // indices into instance.boxes
  std::vector<double> thresholds;   // size order.size(); entry 0 unused
  bool strict = false;
};

struct PolicyOutcome {
  double net_value = 0.0;          // E[terminal - cost_scale * total cost]
  double expected_terminal = 0.0;  // E[terminal reward]
  double expected_spend = 0.0;     // E[total cost], unscaled
};

/// Exact expectation of a threshold policy over all reward realizations
/// (finite-support instances only).
PolicyOutcome evaluate_policy(const PandoraInstance& instance, const ThresholdPolicy& policy,
                              double cost_scale = 1.0);

/// Net value of a deterministic policy, by exhaustive enumeration.
double policy_value(const PandoraInstance& instance, const ThresholdPolicy& policy);

/// The Gittins policy as a threshold policy at scaled costs. Boxes whose
/// indices agree within a relative tolerance form a tie group; within a
/// group the opening order is chosen by the least-expected-cost rule
/// (cost / stop-probability ascending for stop-early, descending for
/// open-on-tie), matching the extremal spends among optimal policies.
ThresholdPolicy gittins_threshold_policy(const PandoraInstance& instance, TieRule tie_rule,
                                         double cost_scale = 1.0, double tie_tol = 0.0);

/// Exact value/terminal/spend of the Gittins policy at scaled costs.
PolicyOutcome evaluate_gittins_policy(const PandoraInstance& instance, TieRule tie_rule,
                                      double cost_scale = 1.0, double tie_tol = 0.0);

/// Exact optimal expected net utility by backward induction over the
/// (opened set, incumbent) state space. Requires <= 6 finite-support boxes
/// with <= 4 atoms each.
double brute_force_value(const PandoraInstance& instance);

/// As above with all costs scaled by `cost_scale`.
double brute_force_value_scaled(const PandoraInstance& instance, double cost_scale);

/// Lagrangian dual objective A(lambda) = V^(*, lambda c) + lambda B.
/// The instance budget must be present; convex in lambda.
double lagrangian_value(const PandoraInstance& instance, double lambda);

/// Budget-feasible mixture of the two tie-rule variants of the optimal
/// policy at the minimizing lambda. Mixes pi_minus (stop-early) with
/// probability alpha and pi_plus (open-on-tie) with 1 - alpha so the
/// expected spend equals B.
struct MixedBudgetPolicy {
  double lambda_star = 0.0;
  double alpha = 1.0;
  double expected_spend = 0.0;
  double expected_value = 0.0;  // expected terminal reward of the mixture
  double spend_minus = 0.0;
  double spend_plus = 0.0;
  double lagrangian_min = 0.0;  // min over lambda of A(lambda)
};

MixedBudgetPolicy budget_lambda(const PandoraInstance& instance, double budget);

/// Plain text instance serialization for test fixtures.
void save_instance(std::ostream& out, const PandoraInstance& instance);
PandoraInstance load_instance(std::istream& in);

}  // namespace pbo
