#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pbo/acquisition.hpp"
#include "pbo/gp.hpp"
#include "pbo/objectives.hpp"
#include "pbo/optimize.hpp"
#include "pbo/sobol.hpp"

namespace pbo {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PolicyKind { ei, eipc, ucb, thompson, pbgi, pbgi_d, pbgi_u };

PolicyKind policy_kind_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::pbgi;
  double lambda = 1e-4;          // pbgi / pbgi-u
  double lambda_initial = 0.1;   // pbgi-d starting lambda
  double beta = 0.5;             // pbgi-d decay factor
  double ucb_delta = 0.1;
};

enum class ObjectiveTag { bayes_prior_draw, ackley, levy, rosenbrock, bump_counterexample };

ObjectiveTag objective_tag_from_string(const std::string& name);
std::string to_string(ObjectiveTag tag);

enum class CostKind { uniform, linear, bump, unknown };

struct CostSpec {
  CostKind kind = CostKind::uniform;
  double uniform_value = 1.0;
  BumpProfile bump{1.0, 50.0, 1.0};
  // For unknown costs: the true underlying cost that gets observed.
  CostKind underlying = CostKind::linear;
};

struct ExperimentConfig {
  ObjectiveTag objective = ObjectiveTag::bayes_prior_draw;
  int dimension = 1;
  DomainBox domain;  // empty -> objective default
  KernelSpec kernel;
  CostSpec cost;
  PolicyConfig policy;
  double budget = 10.0;
  std::vector<std::uint64_t> seeds;
  bool standardize = false;
  double noise_variance = 0.0;
  int n_features = 1024;
  int init_points = 0;  // 0 -> 2 (d + 1)
  int max_steps = 0;  // 0 -> budget-limited only
  MaximizeOptions optimizer;
  BumpProfile amplitude_bump{0.1, 10.0, 1.0};  // bump-counterexample prior envelope
  int ref_grid_points = 1 << 16;

  void validate() const;
  DomainBox effective_domain() const;
  int effective_init_points() const { return init_points > 0 ? init_points : 2 * (dimension + 1); }
};

/// Default search domain of an objective family.
DomainBox default_domain(ObjectiveTag tag, int dimension);

/// Per-step bookkeeping. Values are on the engine's maximization scale
/// (minimization benchmarks are negated internally); regret coincides with
/// the original-scale simple regret.
struct RegretRecord {
  std::uint64_t seed = 0;
  int step = 0;
  double cumulative_cost = 0.0;
  double step_cost = 0.0;
  double observed = 0.0;
  double incumbent = 0.0;
  double regret = 0.0;
  double lambda_t = 0.0;
  Eigen::VectorXd point;
  bool error = false;
  std::string error_message;
};

/// An objective bound to a seed, on the maximization scale.
struct BoundObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  double reference_optimum = 0.0;
  bool reference_is_estimate = false;
  // Amplitude envelope for non-stationary constructions (bump); null otherwise.
  std::function<double(double)> envelope;
  std::function<double(double)> envelope_derivative;
};

/// Draw of the prior used as a synthetic objective; the same seed always
/// yields the same draw, and the reference optimum is estimated on a dense
/// Sobol grid followed by gradient refinement.
BoundObjective bayes_regret_objective(const KernelSpec& kernel, const DomainBox& domain,
                                      int n_features, int ref_grid_points, std::uint64_t seed);

/// The non-stationary counterexample: a Matern prior scaled by a narrow
/// amplitude bump, paired with a bump-shaped cost.
BoundObjective bump_counterexample_objective(const ExperimentConfig& config, std::uint64_t seed);

/// Objective bound for (config, seed); identical seeds share the draw
/// across policies.
BoundObjective make_objective(const ExperimentConfig& config, std::uint64_t seed);

/// True evaluation cost function (what gets charged) for a config.
double true_cost(const ExperimentConfig& config, const Eigen::VectorXd& x);
Eigen::VectorXd true_cost_grad(const ExperimentConfig& config, const Eigen::VectorXd& x);

/// Runs the full Bayesian optimization loop for one seed.
std::vector<RegretRecord> run_experiment_seed(const ExperimentConfig& config, std::uint64_t seed);

/// All configured seeds, optionally in parallel; the result order matches
/// config.seeds regardless of scheduling.
std::vector<std::vector<RegretRecord>> run_experiment(const ExperimentConfig& config, int jobs = 1);

}  // namespace pbo
