#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pbo/math_util.hpp"
#include "pbo/pandora.hpp"
#include "pbo/verify.hpp"

using namespace pbo;

namespace {

PandoraBox deterministic_box(int id, double value, double cost) {
  return PandoraBox{id, RewardDistribution::finite({{value, 1.0}}), cost};
}

double mc_expected_improvement(double mean, double std, double y, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(mean, std);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::max(normal(rng) - y, 0.0);
  return sum / n;
}

}  // namespace

TEST_CASE("expected improvement of reward distributions") {
  SUBCASE("standard Gaussian at its mean") {
    const auto dist = RewardDistribution::gaussian(0.0, 1.0);
    CHECK(dist.expected_improvement(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
  }
  SUBCASE("two-atom support") {
    const auto dist = RewardDistribution::finite({{1.0, 0.5}, {0.0, 0.5}});
    CHECK(expected_improvement_dist(dist, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("Gaussian case agrees with Monte-Carlo") {
    const auto dist = RewardDistribution::gaussian(0.3, 0.7);
    const double exact = dist.expected_improvement(0.1);
    const int n = 10'000'000;
    const double mc = mc_expected_improvement(0.3, 0.7, 0.1, n, 99);
    const double se = 0.7 / std::sqrt(static_cast<double>(n));  // crude upper bound on the SE
    CHECK(std::abs(exact - mc) <= 3.0 * se);
  }
  SUBCASE("monotone decreasing in the comparator") {
    const auto dist = RewardDistribution::gaussian(0.0, 1.0);
    double prev = dist.expected_improvement(-5.0);
    for (double y = -4.5; y < 5.0; y += 0.5) {
      const double cur = dist.expected_improvement(y);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("reward distribution validation") {
  CHECK_THROWS_AS(RewardDistribution::gaussian(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(RewardDistribution::finite({{0.0, 0.6}, {1.0, 0.6}}), std::invalid_argument);
  CHECK_THROWS_AS(RewardDistribution::finite({{0.0, 1.5}, {1.0, -0.5}}), std::invalid_argument);
}

TEST_CASE("gittins index examples") {
  SUBCASE("Gaussian with cost phi(0) has index zero") {
    const double g = gittins_index(RewardDistribution::gaussian(0.0, 1.0), normal_pdf(0.0));
    CHECK(std::abs(g) < 1e-9);
  }
  SUBCASE("deterministic box") {
    const double g = gittins_index(RewardDistribution::finite({{1.0, 1.0}}), 0.3);
    CHECK(g == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("bisection root agrees with Monte-Carlo EI at the root") {
    const double g = gittins_index(RewardDistribution::gaussian(0.0, 1.0), 0.1);
    const int n = 10'000'000;
    const double mc = mc_expected_improvement(0.0, 1.0, g, n, 1234);
    CHECK(std::abs(mc - 0.1) <= 3.0 / std::sqrt(static_cast<double>(n)));
  }
  SUBCASE("cost above the tail EI lands below the support") {
    const auto dist = RewardDistribution::finite({{1.0, 0.5}, {2.0, 0.5}});
    // EI at the support minimum is 0.5; a cost of 0.8 forces the linear tail.
    const double g = gittins_index(dist, 0.8);
    CHECK(g < 1.0);
    CHECK(g == doctest::Approx(dist.mean() - 0.8).epsilon(1e-12));
  }
}

TEST_CASE("gittins index properties") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SUBCASE("residuals stay within tolerance on random solves") {
    for (int i = 0; i < 200; ++i) {
      const double cost = 0.01 + 2.0 * unit(rng);
      RewardDistribution dist =
          i % 2 == 0 ? RewardDistribution::gaussian(4.0 * unit(rng) - 2.0, 0.1 + 2.0 * unit(rng))
                     : RewardDistribution::finite(
                           {{3.0 * unit(rng), 0.25}, {3.0 * unit(rng), 0.5}, {3.0 * unit(rng), 0.25}});
      const double g = gittins_index(dist, cost);
      CHECK(std::abs(dist.expected_improvement(g) - cost) <= 1e-10 * (1.0 + cost));
    }
  }

  SUBCASE("higher cost means lower index") {
    const auto dist = RewardDistribution::gaussian(0.5, 1.2);
    CHECK(gittins_index(dist, 0.2) > gittins_index(dist, 0.6));
    const auto finite = RewardDistribution::finite({{0.0, 0.5}, {2.0, 0.5}});
    CHECK(gittins_index(finite, 0.1) > gittins_index(finite, 0.9));
  }

  SUBCASE("translation equivariance for Gaussian rewards") {
    const double delta = 0.83;
    const double base = gittins_index(RewardDistribution::gaussian(0.2, 0.9), 0.3);
    const double shifted = gittins_index(RewardDistribution::gaussian(0.2 + delta, 0.9), 0.3);
    CHECK(shifted == doctest::Approx(base + delta).epsilon(1e-10));
  }

  SUBCASE("scale equivariance for Gaussian rewards") {
    const double s = 3.7;
    const double base = gittins_index(RewardDistribution::gaussian(0.4, 1.1), 0.25);
    const double scaled = gittins_index(RewardDistribution::gaussian(0.4 * s, 1.1 * s), 0.25 * s);
    CHECK(scaled == doctest::Approx(base * s).epsilon(1e-10));
  }
}

TEST_CASE("gittins policy rollouts") {
  std::mt19937_64 rng(5);

  SUBCASE("a single box is always opened") {
    PandoraInstance instance;
    instance.boxes.push_back(deterministic_box(0, 2.0, 0.5));
    const PolicyTrace trace = run_gittins_policy(instance, TieRule::stop_early, rng);
    CHECK(trace.stopping_step == 1);
    CHECK(trace.terminal_reward == 2.0);
    CHECK(trace.total_cost == 0.5);
  }

  SUBCASE("two deterministic boxes stop after the first") {
    PandoraInstance instance;
    instance.boxes.push_back(deterministic_box(0, 1.0, 0.3));   // index 0.7
    instance.boxes.push_back(deterministic_box(1, 0.5, 0.1));   // index 0.4
    const PolicyTrace trace = run_gittins_policy(instance, TieRule::stop_early, rng);
    CHECK(trace.opened_ids == std::vector<int>{0});
    CHECK(trace.terminal_reward - trace.total_cost == doctest::Approx(0.7));
    const double exact = evaluate_gittins_policy(instance, TieRule::stop_early).net_value;
    CHECK(exact == doctest::Approx(0.7).epsilon(1e-12));
  }

  SUBCASE("exact policy value equals the DP optimum on a random 3-box instance") {
    std::mt19937_64 gen(17);
    const PandoraInstance instance = random_finite_instance(gen, 3, 3);
    const double policy = evaluate_gittins_policy(instance, TieRule::stop_early).net_value;
    CHECK(policy == doctest::Approx(brute_force_value(instance)).epsilon(1e-11));
  }
}

TEST_CASE("policy_value on explicit threshold policies") {
  PandoraInstance instance;
  instance.boxes.push_back(deterministic_box(0, 1.0, 0.3));
  instance.boxes.push_back(deterministic_box(1, 0.5, 0.1));

  SUBCASE("open box 0 then stop") {
    ThresholdPolicy policy;
    policy.order = {0};
    policy.thresholds = {0.0};
    CHECK(policy_value(instance, policy) == doctest::Approx(0.7).epsilon(1e-15));
  }

  SUBCASE("single stochastic box") {
    PandoraInstance single;
    single.boxes.push_back(PandoraBox{0, RewardDistribution::finite({{2.0, 0.5}, {0.0, 0.5}}), 0.4});
    ThresholdPolicy policy;
    policy.order = {0};
    policy.thresholds = {0.0};
    CHECK(policy_value(single, policy) == doctest::Approx(0.6).epsilon(1e-15));
  }

  SUBCASE("Gaussian rewards are rejected for exact evaluation") {
    PandoraInstance gaussian;
    gaussian.boxes.push_back(PandoraBox{0, RewardDistribution::gaussian(0.0, 1.0), 0.5});
    ThresholdPolicy policy;
    policy.order = {0};
    policy.thresholds = {0.0};
    CHECK_THROWS_AS(policy_value(gaussian, policy), UnsupportedError);
    CHECK_THROWS_AS(brute_force_value(gaussian), UnsupportedError);
  }
}

TEST_CASE("brute-force oracle") {
  SUBCASE("one deterministic box") {
    PandoraInstance instance;
    instance.boxes.push_back(deterministic_box(0, 1.0, 0.3));
    CHECK(brute_force_value(instance) == doctest::Approx(0.7).epsilon(1e-15));
  }

  SUBCASE("two deterministic boxes match the hand computation") {
    PandoraInstance instance;
    instance.boxes.push_back(deterministic_box(0, 1.0, 0.3));
    instance.boxes.push_back(deterministic_box(1, 0.5, 0.1));
    CHECK(brute_force_value(instance) == doctest::Approx(0.7).epsilon(1e-15));
  }

  SUBCASE("size limits are enforced") {
    PandoraInstance instance;
    for (int i = 0; i < 7; ++i) instance.boxes.push_back(deterministic_box(i, 1.0, 0.5));
    CHECK_THROWS_AS(brute_force_value(instance), std::invalid_argument);
  }

  SUBCASE("policy equivalence over many random instances, both tie rules") {
    const OptimalityReport report = run_optimality_suite(60, 2024);
    CHECK(report.pass);
    CHECK(report.max_residual <= 1e-9);
  }
}

TEST_CASE("lagrangian dual") {
  std::mt19937_64 rng(31);

  SUBCASE("at lambda zero, opening every box is optimal") {
    PandoraInstance instance = random_finite_instance(rng, 3, 2);
    instance.budget = instance.min_cost() + 0.5 * (instance.total_cost() - instance.min_cost());
    // E max over all boxes, by direct enumeration.
    double emax = 0.0;
    const auto& boxes = instance.boxes;
    std::vector<std::size_t> digit(boxes.size(), 0);
    while (true) {
      double p = 1.0, best = -1e300;
      for (std::size_t j = 0; j < boxes.size(); ++j) {
        const Atom& a = boxes[j].reward.atoms()[digit[j]];
        p *= a.probability;
        best = std::max(best, a.value);
      }
      emax += p * best;
      std::size_t k = 0;
      while (k < boxes.size() && ++digit[k] == boxes[k].reward.atoms().size()) digit[k++] = 0;
      if (k == boxes.size()) break;
    }
    CHECK(lagrangian_value(instance, 0.0) == doctest::Approx(emax).epsilon(1e-12));
  }

  SUBCASE("affine growth for large lambda with slope B - min cost") {
    PandoraInstance instance;
    instance.boxes.push_back(PandoraBox{0, RewardDistribution::finite({{1.0, 0.5}, {2.0, 0.5}}), 0.4});
    instance.boxes.push_back(PandoraBox{1, RewardDistribution::finite({{0.5, 1.0}}), 0.9});
    instance.budget = 0.7;
    const double a1 = lagrangian_value(instance, 50.0);
    const double a2 = lagrangian_value(instance, 60.0);
    CHECK((a2 - a1) / 10.0 == doctest::Approx(0.7 - 0.4).epsilon(1e-9));
  }

  SUBCASE("midpoint convexity on random instances") {
    for (int i = 0; i < 20; ++i) {
      PandoraInstance instance = random_finite_instance(rng, 4, 3);
      instance.budget = instance.min_cost() + 0.3 * (instance.total_cost() - instance.min_cost());
      std::uniform_real_distribution<double> lam(0.0, 3.0);
      const double l1 = lam(rng), l2 = lam(rng);
      const double mid = lagrangian_value(instance, 0.5 * (l1 + l2));
      CHECK(mid <= 0.5 * (lagrangian_value(instance, l1) + lagrangian_value(instance, l2)) + 1e-10);
    }
  }
}

TEST_CASE("budget-constrained mixture") {
  SUBCASE("two identical deterministic boxes, B = 1.5") {
    PandoraInstance instance;
    instance.boxes.push_back(deterministic_box(0, 1.0, 1.0));
    instance.boxes.push_back(deterministic_box(1, 1.0, 1.0));
    const MixedBudgetPolicy mixed = budget_lambda(instance, 1.5);
    CHECK(mixed.alpha == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(mixed.expected_spend == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(mixed.spend_minus == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mixed.spend_plus == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(mixed.expected_value == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("lambda* decreases as the budget loosens") {
    PandoraInstance instance;
    instance.boxes.push_back(
        PandoraBox{0, RewardDistribution::finite({{0.5, 0.6}, {2.0, 0.4}}), 0.4});
    instance.boxes.push_back(
        PandoraBox{1, RewardDistribution::finite({{1.0, 0.7}, {2.5, 0.3}}), 0.6});
    instance.boxes.push_back(
        PandoraBox{2, RewardDistribution::finite({{0.2, 0.5}, {1.4, 0.5}}), 0.3});
    const double free_spend = evaluate_gittins_policy(instance, TieRule::stop_early, 1e-9).expected_spend;
    const double min_cost = instance.min_cost();
    const double tight = budget_lambda(instance, min_cost + 0.2 * (free_spend - min_cost)).lambda_star;
    const double loose = budget_lambda(instance, min_cost + 0.8 * (free_spend - min_cost)).lambda_star;
    CHECK(tight > loose);
  }

  SUBCASE("inactive constraints are rejected") {
    PandoraInstance instance;
    instance.boxes.push_back(deterministic_box(0, 1.0, 1.0));
    instance.boxes.push_back(deterministic_box(1, 1.0, 1.0));
    CHECK_THROWS_AS(budget_lambda(instance, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(budget_lambda(instance, 2.5), std::invalid_argument);
  }

  SUBCASE("random active-budget instances satisfy all construction checks") {
    const BudgetSuiteReport report = run_budget_suite(15, 77);
    CHECK(report.pass);
    for (const auto& c : report.cases) {
      CHECK(c.lambda_positive);
      CHECK(c.bracket_ok);
      CHECK(c.convexity_ok);
      CHECK(c.spend_residual <= 1e-6);
      CHECK(c.value_residual <= 1e-6);
    }
  }

  SUBCASE("the miswired negative control is detected") {
    const BudgetSuiteReport report = run_budget_suite(15, 77, /*swap_tie_rules=*/true);
    CHECK_FALSE(report.pass);
  }
}

TEST_CASE("instance text serialization round-trips") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 10; ++i) {
    PandoraInstance instance = random_finite_instance(rng, 4, 3);
    if (i % 2 == 0)
      instance.budget = instance.min_cost() + 0.4 * (instance.total_cost() - instance.min_cost());
    std::stringstream stream;
    save_instance(stream, instance);
    const PandoraInstance loaded = load_instance(stream);
    REQUIRE(loaded.boxes.size() == instance.boxes.size());
    CHECK(loaded.budget.has_value() == instance.budget.has_value());
    CHECK(brute_force_value(loaded) == doctest::Approx(brute_force_value(instance)).epsilon(1e-14));
    for (std::size_t j = 0; j < instance.boxes.size(); ++j) {
      CHECK(loaded.boxes[j].cost == instance.boxes[j].cost);
      CHECK(gittins_index(loaded.boxes[j]) == gittins_index(instance.boxes[j]));
    }
  }
}

TEST_CASE("instance validation") {
  PandoraInstance empty;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

  PandoraInstance bad_cost;
  bad_cost.boxes.push_back(PandoraBox{0, RewardDistribution::finite({{1.0, 1.0}}), 0.0});
  CHECK_THROWS_AS(bad_cost.validate(), std::invalid_argument);
}
