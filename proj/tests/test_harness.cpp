#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "pbo/config.hpp"
#include "pbo/csv.hpp"
#include "pbo/experiment.hpp"
#include "pbo/summarize.hpp"

using namespace pbo;

namespace {

ExperimentConfig small_bayes_config() {
  ExperimentConfig config;
  config.objective = ObjectiveTag::bayes_prior_draw;
  config.dimension = 1;
  config.kernel.lengthscale = 0.15;
  config.budget = 12.0;
  config.seeds = {1, 2};
  config.n_features = 128;
  config.ref_grid_points = 2048;
  config.optimizer.sweep_points_per_dim = 100;
  config.optimizer.restarts_per_dim = 4;
  config.optimizer.max_iterations = 40;
  return config;
}

}  // namespace

TEST_CASE("budget semantics") {
  SUBCASE("a budget below the first step cost yields only the initialization row") {
    ExperimentConfig config = small_bayes_config();
    config.cost.kind = CostKind::uniform;
    config.cost.uniform_value = 5.0;
    config.init_points = 2;
    config.budget = 13.0;  // init costs 10, remainder 3 < 5
    const auto runs = run_experiment(config, 1);
    for (const auto& records : runs) {
      REQUIRE(records.size() == 1);
      CHECK(records[0].step == 0);
      CHECK(records[0].cumulative_cost == 10.0);
    }
  }

  SUBCASE("uniform costs take exactly floor((B - init) / C) steps") {
    ExperimentConfig config = small_bayes_config();
    config.cost.kind = CostKind::uniform;
    config.cost.uniform_value = 1.0;
    config.init_points = 4;
    config.budget = 11.5;  // init 4, then 7 unit-cost steps
    const auto runs = run_experiment(config, 1);
    for (const auto& records : runs) CHECK(records.back().step == 7);
  }

  SUBCASE("cumulative cost never exceeds the budget") {
    ExperimentConfig config = small_bayes_config();
    config.cost.kind = CostKind::linear;
    config.budget = 90.0;
    const auto runs = run_experiment(config, 1);
    for (const auto& records : runs)
      for (const RegretRecord& r : records) CHECK(r.cumulative_cost <= config.budget + 1e-12);
  }

  SUBCASE("a budget below the initialization cost is a config error") {
    ExperimentConfig config = small_bayes_config();
    config.cost.kind = CostKind::uniform;
    config.cost.uniform_value = 2.0;
    config.init_points = 4;
    config.budget = 7.0;
    CHECK_THROWS_AS(run_experiment(config, 1), ConfigError);
  }
}

TEST_CASE("record invariants") {
  ExperimentConfig config = small_bayes_config();
  config.policy.kind = PolicyKind::pbgi_d;
  const auto runs = run_experiment(config, 1);
  for (const auto& records : runs) {
    for (std::size_t i = 1; i < records.size(); ++i) {
      CHECK(records[i].cumulative_cost >= records[i - 1].cumulative_cost);
      CHECK(records[i].incumbent >= records[i - 1].incumbent);
      CHECK(records[i].regret <= records[i - 1].regret + 1e-15);
      CHECK(records[i].lambda_t <= records[i - 1].lambda_t);  // pbgi-d only decays
    }
  }
}

TEST_CASE("determinism and seed pairing") {
  SUBCASE("identical configs give bit-identical traces") {
    ExperimentConfig config = small_bayes_config();
    const std::string a = records_to_csv(run_experiment(config, 1), config.dimension);
    const std::string b = records_to_csv(run_experiment(config, 1), config.dimension);
    CHECK(a == b);
  }

  SUBCASE("policies share initialization and objective draw per seed") {
    ExperimentConfig config = small_bayes_config();
    config.policy.kind = PolicyKind::pbgi;
    const auto pbgi_runs = run_experiment(config, 1);
    config.policy.kind = PolicyKind::ucb;
    const auto ucb_runs = run_experiment(config, 1);
    for (std::size_t s = 0; s < config.seeds.size(); ++s) {
      CHECK(pbgi_runs[s][0].incumbent == ucb_runs[s][0].incumbent);
      CHECK(pbgi_runs[s][0].cumulative_cost == ucb_runs[s][0].cumulative_cost);
      CHECK(pbgi_runs[s][0].regret == ucb_runs[s][0].regret);
    }
  }

  SUBCASE("uniform-cost EIPC and EI produce identical point sequences") {
    ExperimentConfig config = small_bayes_config();
    config.dimension = 2;
    config.kernel.lengthscale = 0.25;
    config.cost.kind = CostKind::uniform;
    config.policy.kind = PolicyKind::eipc;
    const auto a = run_experiment(config, 1);
    config.policy.kind = PolicyKind::ei;
    const auto b = run_experiment(config, 1);
    CHECK(records_to_csv(a, 2) == records_to_csv(b, 2));
  }

  SUBCASE("parallel execution matches serial execution") {
    ExperimentConfig config = small_bayes_config();
    config.seeds = {1, 2, 3, 4};
    const std::string serial = records_to_csv(run_experiment(config, 1), config.dimension);
    const std::string parallel = records_to_csv(run_experiment(config, 4), config.dimension);
    CHECK(serial == parallel);
  }
}

TEST_CASE("bayes objective draws") {
  KernelSpec kernel;
  kernel.lengthscale = 0.2;
  const DomainBox domain = DomainBox::cube(1, 0.0, 1.0);

  SUBCASE("same seed gives identical objectives") {
    const BoundObjective a = bayes_regret_objective(kernel, domain, 64, 1024, 7);
    const BoundObjective b = bayes_regret_objective(kernel, domain, 64, 1024, 7);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.37);
    CHECK(a.value(x) == b.value(x));
    CHECK(a.reference_optimum == b.reference_optimum);
  }

  SUBCASE("the reference optimum dominates random evaluations") {
    const BoundObjective obj = bayes_regret_objective(kernel, domain, 64, 4096, 11);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
      const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, unit(rng));
      CHECK(obj.value(x) <= obj.reference_optimum + 1e-9);
    }
    CHECK(obj.reference_is_estimate);
  }
}

TEST_CASE("bump counterexample construction") {
  ExperimentConfig config;
  config.objective = ObjectiveTag::bump_counterexample;
  config.dimension = 1;
  config.kernel.lengthscale = 1.0;
  config.cost.kind = CostKind::bump;
  config.cost.bump = BumpProfile{1.0, 50.0, 1.0};
  config.amplitude_bump = BumpProfile{0.1, 10.0, 1.0};
  config.budget = 100.0;
  config.seeds = {1};
  config.n_features = 128;
  config.ref_grid_points = 4096;

  SUBCASE("cost decays to the baseline away from the bump") {
    CHECK(true_cost(config, Eigen::VectorXd::Constant(1, 400.0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(true_cost(config, Eigen::VectorXd::Zero(1)) == doctest::Approx(51.0));
  }

  SUBCASE("prior variance at the bump center exceeds the far-field variance") {
    const BoundObjective obj = bump_counterexample_objective(config, 5);
    REQUIRE(obj.envelope);
    CHECK(obj.envelope(0.0) > obj.envelope(100.0));
    CHECK(obj.envelope(0.0) == doctest::Approx(10.1));
    CHECK(obj.envelope(100.0) == doctest::Approx(0.1).epsilon(1e-8));
  }

  SUBCASE("objective draws scale with the envelope") {
    const BoundObjective obj = bump_counterexample_objective(config, 5);
    // Far from the bump, |f| is bounded by the small baseline amplitude scale.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> far(200.0, 500.0);
    for (int i = 0; i < 200; ++i) {
      const double v = obj.value(Eigen::VectorXd::Constant(1, far(rng)));
      CHECK(std::abs(v) < 0.1 * 6.0);
    }
  }
}

TEST_CASE("thompson sampling runs end to end") {
  ExperimentConfig config = small_bayes_config();
  config.policy.kind = PolicyKind::thompson;
  config.budget = 10.0;
  const auto runs = run_experiment(config, 1);
  for (const auto& records : runs) {
    CHECK(records.back().step >= 1);
    for (std::size_t i = 1; i < records.size(); ++i) CHECK(records[i].lambda_t == 0.0);
  }
  // fresh path per step: rerun is still deterministic
  const auto again = run_experiment(config, 1);
  CHECK(records_to_csv(runs, 1) == records_to_csv(again, 1));
}

TEST_CASE("unknown-cost experiments run and record true costs") {
  ExperimentConfig config = small_bayes_config();
  config.cost.kind = CostKind::unknown;
  config.cost.underlying = CostKind::linear;
  config.policy.kind = PolicyKind::pbgi_u;
  config.budget = 120.0;
  const auto runs = run_experiment(config, 1);
  const DomainBox domain = config.effective_domain();
  for (const auto& records : runs) {
    CHECK(records.back().step >= 1);
    for (std::size_t i = 1; i < records.size(); ++i)
      CHECK(records[i].step_cost == linear_cost(records[i].point, domain));
  }
}

TEST_CASE("config validation names the offence") {
  ExperimentConfig config = small_bayes_config();

  SUBCASE("pbgi-u needs unknown costs") {
    config.policy.kind = PolicyKind::pbgi_u;
    config.cost.kind = CostKind::uniform;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
  SUBCASE("duplicate seeds") {
    config.seeds = {1, 1};
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
  SUBCASE("bump objective must be one-dimensional") {
    config.objective = ObjectiveTag::bump_counterexample;
    config.dimension = 2;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
}

TEST_CASE("json config parsing") {
  const std::string good = R"({
    "objective": "ackley",
    "dimension": 2,
    "kernel": {"family": "matern52", "lengthscale": 0.1},
    "policy": {"name": "pbgi", "lambda": 1e-4},
    "budget": 10.0,
    "seeds": [0, 1],
    "standardize": true
  })";
  const ExperimentConfig config = parse_experiment_config(good);
  CHECK(config.objective == ObjectiveTag::ackley);
  CHECK(config.dimension == 2);
  CHECK(config.standardize);
  CHECK(config.policy.kind == PolicyKind::pbgi);

  SUBCASE("a missing kernel key is named in the error") {
    const std::string missing = R"({
      "objective": "ackley", "dimension": 2,
      "policy": "pbgi", "budget": 10.0, "seeds": [0]
    })";
    try {
      parse_experiment_config(missing);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("kernel") != std::string::npos);
    }
  }

  SUBCASE("policy lists back the sweep subcommand") {
    const std::string with_list = R"({
      "objective": "ackley", "dimension": 1,
      "kernel": {"lengthscale": 0.2},
      "policy": "pbgi",
      "policies": ["pbgi", {"name": "eipc"}, "ucb"],
      "budget": 5.0, "seeds": [0]
    })";
    const auto policies = parse_policy_list(with_list);
    REQUIRE(policies.size() == 3);
    CHECK(policies[0].kind == PolicyKind::pbgi);
    CHECK(policies[1].kind == PolicyKind::eipc);
    CHECK(policies[2].kind == PolicyKind::ucb);
  }
}

TEST_CASE("csv round trip preserves every field") {
  ExperimentConfig config = small_bayes_config();
  const auto runs = run_experiment(config, 1);
  const std::string csv = records_to_csv(runs, config.dimension);
  std::istringstream in(csv);
  const auto parsed = read_records_csv(in);
  REQUIRE(parsed.size() == runs.size());
  for (std::size_t s = 0; s < runs.size(); ++s) {
    REQUIRE(parsed[s].size() == runs[s].size());
    for (std::size_t i = 0; i < runs[s].size(); ++i) {
      CHECK(parsed[s][i].seed == runs[s][i].seed);
      CHECK(parsed[s][i].step == runs[s][i].step);
      CHECK(parsed[s][i].cumulative_cost == runs[s][i].cumulative_cost);
      CHECK(parsed[s][i].observed == runs[s][i].observed);
      CHECK(parsed[s][i].incumbent == runs[s][i].incumbent);
      CHECK(parsed[s][i].regret == runs[s][i].regret);
      CHECK(parsed[s][i].lambda_t == runs[s][i].lambda_t);
      CHECK(parsed[s][i].point == runs[s][i].point);
    }
  }
}

namespace {

std::vector<RegretRecord> synthetic_trace(std::uint64_t seed, std::vector<double> costs,
                                          std::vector<double> regrets) {
  std::vector<RegretRecord> records;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    RegretRecord r;
    r.seed = seed;
    r.step = static_cast<int>(i);
    r.cumulative_cost = costs[i];
    r.regret = regrets[i];
    r.point = Eigen::VectorXd::Zero(1);
    records.push_back(r);
  }
  return records;
}

}  // namespace

TEST_CASE("summaries") {
  SUBCASE("a single seed has median equal to both quartiles") {
    std::map<std::string, std::vector<std::vector<RegretRecord>>> traces;
    traces["pbgi"] = {synthetic_trace(1, {1.0, 2.0, 3.0}, {5.0, 4.0, 2.0})};
    const auto rows = summarize_regret(traces);
    for (const SummaryRow& row : rows) {
      CHECK(row.median == row.q25);
      CHECK(row.median == row.q75);
    }
  }

  SUBCASE("two seeds give midpoint medians") {
    std::map<std::string, std::vector<std::vector<RegretRecord>>> traces;
    traces["ei"] = {synthetic_trace(1, {1.0, 2.0}, {4.0, 2.0}),
                    synthetic_trace(2, {1.0, 2.0}, {6.0, 3.0})};
    const auto rows = summarize_regret(traces);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].median == doctest::Approx(5.0));
    CHECK(rows[1].median == doctest::Approx(2.5));
  }

  SUBCASE("sixteen seeds match an independent quantile computation") {
    std::map<std::string, std::vector<std::vector<RegretRecord>>> traces;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> finals;
    for (int s = 0; s < 16; ++s) {
      const double a = 3.0 + unit(rng), b = 1.0 + unit(rng);
      traces["pbgi"].push_back(synthetic_trace(s, {1.0, 2.0}, {a, b}));
      finals.push_back(b);
    }
    const auto rows = summarize_regret(traces);
    REQUIRE(rows.size() == 2);

    // Independent reimplementation of the interpolated quantiles.
    std::sort(finals.begin(), finals.end());
    auto q = [&](double p) {
      const double h = 15.0 * p;
      const int lo = static_cast<int>(h);
      return finals[lo] + (h - lo) * (finals[lo + 1] - finals[lo]);
    };
    CHECK(rows[1].median == doctest::Approx(q(0.5)).epsilon(1e-12));
    CHECK(rows[1].q25 == doctest::Approx(q(0.25)).epsilon(1e-12));
    CHECK(rows[1].q75 == doctest::Approx(q(0.75)).epsilon(1e-12));
    CHECK(rows[1].q25 <= rows[1].median);
    CHECK(rows[1].median <= rows[1].q75);
  }

  SUBCASE("mismatched seed sets are an alignment error") {
    std::map<std::string, std::vector<std::vector<RegretRecord>>> traces;
    traces["pbgi"] = {synthetic_trace(1, {1.0}, {2.0})};
    traces["ei"] = {synthetic_trace(2, {1.0}, {2.0})};
    CHECK_THROWS_AS(summarize_regret(traces), AlignmentError);
  }

  SUBCASE("carried-forward alignment on heterogeneous cost grids") {
    std::map<std::string, std::vector<std::vector<RegretRecord>>> traces;
    traces["pbgi"] = {synthetic_trace(1, {1.0, 4.0}, {5.0, 1.0}),
                      synthetic_trace(2, {2.0, 3.0}, {4.0, 2.0})};
    const auto rows = summarize_regret(traces);
    // Grid starts at 2.0 (the latest first observation); at cost 3.0 seed 1
    // still carries 5.0 while seed 2 has reached 2.0.
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].cumulative_cost == 2.0);
    CHECK(rows[1].cumulative_cost == 3.0);
    CHECK(rows[1].median == doctest::Approx(3.5));
  }
}

TEST_CASE("experiment metadata sidecar") {
  ExperimentConfig config = small_bayes_config();
  const auto runs = run_experiment(config, 1);
  const std::string meta = experiment_metadata_json(config, runs);
  CHECK(meta.find("reference_optimum") != std::string::npos);
  CHECK(meta.find("initialization points are charged") != std::string::npos);
}
