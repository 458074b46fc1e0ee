#include "pbo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

#include "pbo/math_util.hpp"
#include "pbo/rff.hpp"

namespace pbo {

namespace {

// Named substreams of a run seed.
enum Stream : std::uint64_t {
  kObjectiveStream = 11,
  kInitStream = 13,
  kAcqStream = 17,
  kThompsonStream = 19,
  kRefStream = 23,
};

}  // namespace

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "ei") return PolicyKind::ei;
  if (name == "eipc") return PolicyKind::eipc;
  if (name == "ucb") return PolicyKind::ucb;
  if (name == "ts" || name == "thompson") return PolicyKind::thompson;
  if (name == "pbgi") return PolicyKind::pbgi;
  if (name == "pbgi-d" || name == "pbgi_d") return PolicyKind::pbgi_d;
  if (name == "pbgi-u" || name == "pbgi_u") return PolicyKind::pbgi_u;
  throw ConfigError("unknown policy name: " + name);
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ei: return "ei";
    case PolicyKind::eipc: return "eipc";
    case PolicyKind::ucb: return "ucb";
    case PolicyKind::thompson: return "ts";
    case PolicyKind::pbgi: return "pbgi";
    case PolicyKind::pbgi_d: return "pbgi-d";
    case PolicyKind::pbgi_u: return "pbgi-u";
  }
  return "?";
}

ObjectiveTag objective_tag_from_string(const std::string& name) {
  if (name == "bayes-prior-draw" || name == "bayes") return ObjectiveTag::bayes_prior_draw;
  if (name == "ackley") return ObjectiveTag::ackley;
  if (name == "levy") return ObjectiveTag::levy;
  if (name == "rosenbrock") return ObjectiveTag::rosenbrock;
  if (name == "bump-counterexample" || name == "bump") return ObjectiveTag::bump_counterexample;
  throw ConfigError("unknown objective tag: " + name);
}

std::string to_string(ObjectiveTag tag) {
  switch (tag) {
    case ObjectiveTag::bayes_prior_draw: return "bayes-prior-draw";
    case ObjectiveTag::ackley: return "ackley";
    case ObjectiveTag::levy: return "levy";
    case ObjectiveTag::rosenbrock: return "rosenbrock";
    case ObjectiveTag::bump_counterexample: return "bump-counterexample";
  }
  return "?";
}

DomainBox default_domain(ObjectiveTag tag, int dimension) {
  switch (tag) {
    case ObjectiveTag::bayes_prior_draw: return DomainBox::cube(dimension, 0.0, 1.0);
    case ObjectiveTag::ackley: return DomainBox::cube(dimension, -1.0, 1.0);
    case ObjectiveTag::levy: return DomainBox::cube(dimension, -10.0, 10.0);
    case ObjectiveTag::rosenbrock: return DomainBox::cube(dimension, -5.0, 10.0);
    case ObjectiveTag::bump_counterexample: return DomainBox::cube(dimension, -500.0, 500.0);
  }
  return DomainBox::cube(dimension, 0.0, 1.0);
}

void ExperimentConfig::validate() const {
  if (dimension < 1) throw ConfigError("dimension must be >= 1");
  if (objective == ObjectiveTag::bump_counterexample && dimension != 1)
    throw ConfigError("bump-counterexample is one-dimensional");
  kernel.validate();
  if (!(budget > 0.0)) throw ConfigError("budget must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed required");
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (std::size_t j = i + 1; j < seeds.size(); ++j)
      if (seeds[i] == seeds[j]) throw ConfigError("seeds must be distinct");
  if (n_features < 1) throw ConfigError("n_features must be >= 1");
  if (noise_variance < 0.0) throw ConfigError("noise_variance must be nonnegative");
  if (objective == ObjectiveTag::bump_counterexample) {
    if (standardize) throw ConfigError("standardization is not supported on the bump construction");
    if (policy.kind == PolicyKind::thompson)
      throw ConfigError("thompson sampling is not supported on the bump construction");
  }
  if ((cost.kind == CostKind::bump ||
       (cost.kind == CostKind::unknown && cost.underlying == CostKind::bump)) &&
      dimension != 1)
    throw ConfigError("bump costs are one-dimensional");
  if (policy.kind == PolicyKind::pbgi_u && cost.kind != CostKind::unknown)
    throw ConfigError("pbgi-u requires an unknown cost model");
  effective_domain().validate();
}

DomainBox ExperimentConfig::effective_domain() const {
  if (domain.lower.size() == 0) return default_domain(objective, dimension);
  if (domain.dim() != dimension) throw ConfigError("domain dimension mismatch");
  return domain;
}

namespace {

BoundObjective make_path_objective(FourierFeaturePath path, const DomainBox& domain,
                                   int ref_grid_points, std::uint64_t ref_seed,
                                   std::function<double(double)> envelope,
                                   std::function<double(double)> envelope_derivative) {
  auto shared = std::make_shared<FourierFeaturePath>(std::move(path));

  BoundObjective obj;
  if (envelope) {
    obj.value = [shared, envelope](const Eigen::VectorXd& x) {
      return envelope(x[0]) * shared->value(x);
    };
  } else {
    obj.value = [shared](const Eigen::VectorXd& x) { return shared->value(x); };
  }
  obj.envelope = envelope;
  obj.envelope_derivative = envelope_derivative;
  obj.reference_is_estimate = true;

  // Dense scrambled-Sobol sweep, then gradient refinement from the best
  // grid points.
  Eigen::MatrixXd grid = sobol_candidates(domain, ref_grid_points, ref_seed);
  Eigen::VectorXd values = shared->value_batch(grid);
  if (envelope)
    for (Eigen::Index i = 0; i < values.size(); ++i) values[i] *= envelope(grid(i, 0));

  std::vector<int> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::partial_sort(order.begin(), order.begin() + std::min<std::size_t>(5, order.size()), order.end(),
                    [&](int a, int b) { return values[a] > values[b]; });

  Acquisition acq;
  acq.value = obj.value;
  if (envelope) {
    auto denv = envelope_derivative;
    acq.gradient = [shared, envelope, denv](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
      Eigen::VectorXd g = envelope(x[0]) * shared->gradient(x);
      g[0] += denv(x[0]) * shared->value(x);
      return g;
    };
  } else {
    acq.gradient = [shared](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
      return shared->gradient(x);
    };
  }

  double best = values.maxCoeff();
  for (std::size_t k = 0; k < std::min<std::size_t>(5, order.size()); ++k) {
    const RestartTrajectory traj = refine_ascent(acq, domain, grid.row(order[k]).transpose());
    best = std::max(best, traj.end_value);
  }
  obj.reference_optimum = best;
  return obj;
}

}  // namespace

BoundObjective bayes_regret_objective(const KernelSpec& kernel, const DomainBox& domain,
                                      int n_features, int ref_grid_points, std::uint64_t seed) {
  FourierFeaturePath path = sample_prior_path(kernel, domain.dim(), n_features,
                                              derive_seed(seed, kObjectiveStream));
  return make_path_objective(std::move(path), domain, ref_grid_points,
                             derive_seed(seed, kRefStream), nullptr, nullptr);
}

BoundObjective bump_counterexample_objective(const ExperimentConfig& config, std::uint64_t seed) {
  KernelSpec unit = config.kernel;
  unit.amplitude = 1.0;
  FourierFeaturePath path =
      sample_prior_path(unit, 1, config.n_features, derive_seed(seed, kObjectiveStream));
  const BumpProfile bump = config.amplitude_bump;
  return make_path_objective(
      std::move(path), config.effective_domain(), config.ref_grid_points,
      derive_seed(seed, kRefStream), [bump](double x) { return bump(x); },
      [bump](double x) { return bump.derivative(x); });
}

BoundObjective make_objective(const ExperimentConfig& config, std::uint64_t seed) {
  const DomainBox domain = config.effective_domain();
  BoundObjective obj;
  switch (config.objective) {
    case ObjectiveTag::bayes_prior_draw:
      return bayes_regret_objective(config.kernel, domain, config.n_features, config.ref_grid_points,
                                    seed);
    case ObjectiveTag::bump_counterexample:
      return bump_counterexample_objective(config, seed);
    case ObjectiveTag::ackley:
      obj.value = [](const Eigen::VectorXd& x) { return -ackley(x); };
      break;
    case ObjectiveTag::levy:
      obj.value = [](const Eigen::VectorXd& x) { return -levy(x); };
      break;
    case ObjectiveTag::rosenbrock:
      obj.value = [](const Eigen::VectorXd& x) { return -rosenbrock(x); };
      break;
  }
  obj.reference_optimum = 0.0;  // known minima, negated
  obj.reference_is_estimate = false;
  return obj;
}

namespace {

double cost_of_kind(CostKind kind, const CostSpec& spec, const ExperimentConfig& config,
                    const Eigen::VectorXd& x) {
  switch (kind) {
    case CostKind::uniform: return spec.uniform_value;
    case CostKind::linear: return linear_cost(x, config.effective_domain());
    case CostKind::bump: return spec.bump(x[0]);
    case CostKind::unknown: return cost_of_kind(spec.underlying, spec, config, x);
  }
  return spec.uniform_value;
}

Eigen::VectorXd cost_grad_of_kind(CostKind kind, const CostSpec& spec, const ExperimentConfig& config,
                                  const Eigen::VectorXd& x) {
  switch (kind) {
    case CostKind::uniform: return Eigen::VectorXd::Zero(x.size());
    case CostKind::linear: return linear_cost_grad(x, config.effective_domain());
    case CostKind::bump: {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
      g[0] = spec.bump.derivative(x[0]);
      return g;
    }
    case CostKind::unknown: return cost_grad_of_kind(spec.underlying, spec, config, x);
  }
  return Eigen::VectorXd::Zero(x.size());
}

}  // namespace

double true_cost(const ExperimentConfig& config, const Eigen::VectorXd& x) {
  return cost_of_kind(config.cost.kind, config.cost, config, x);
}

Eigen::VectorXd true_cost_grad(const ExperimentConfig& config, const Eigen::VectorXd& x) {
  return cost_grad_of_kind(config.cost.kind, config.cost, config, x);
}

namespace {

// Acquisition bundle for one step. Gradient-undefined points are reported
// as nullopt so the optimizer can exclude them.
Acquisition make_step_acquisition(PolicyKind kind, const AcquisitionContext& ctx,
                                  std::shared_ptr<const ConditionedPath> ts_path) {
  Acquisition acq;
  switch (kind) {
    case PolicyKind::ei:
      acq.value = [&ctx](const Eigen::VectorXd& x) { return ei(ctx, x); };
      acq.gradient = [&ctx](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
        try {
          return ei_grad(ctx, x);
        } catch (const GradientUndefined&) {
          return std::nullopt;
        }
      };
      break;
    case PolicyKind::eipc:
      acq.value = [&ctx](const Eigen::VectorXd& x) { return eipc(ctx, x); };
      acq.gradient = [&ctx](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
        try {
          return eipc_grad(ctx, x);
        } catch (const GradientUndefined&) {
          return std::nullopt;
        }
      };
      break;
    case PolicyKind::ucb:
      acq.value = [&ctx](const Eigen::VectorXd& x) { return ucb(ctx, x); };
      acq.gradient = [&ctx](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
        try {
          return ucb_grad(ctx, x);
        } catch (const GradientUndefined&) {
          return std::nullopt;
        }
      };
      break;
    case PolicyKind::thompson:
      acq.value = [ts_path](const Eigen::VectorXd& x) { return thompson_objective(*ts_path, x); };
      acq.gradient = [ts_path](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
        return ts_path->gradient(x);
      };
      break;
    case PolicyKind::pbgi:
    case PolicyKind::pbgi_d:
    case PolicyKind::pbgi_u:
      acq.value = [&ctx](const Eigen::VectorXd& x) { return pbgi(ctx, x); };
      acq.gradient = [&ctx](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
        try {
          return pbgi_grad(ctx, x);
        } catch (const GradientUndefined&) {
          return std::nullopt;
        }
      };
      break;
  }
  return acq;
}

struct Standardization {
  double mean = 0.0;
  double scale = 1.0;
};

Standardization fit_standardization(const Eigen::VectorXd& y, bool enabled) {
  if (!enabled || y.size() == 0) return {};
  Standardization s;
  s.mean = y.mean();
  const double sd = std::sqrt((y.array() - s.mean).square().mean());
  s.scale = sd > 0.0 ? sd : 1.0;
  return s;
}

}  // namespace

std::vector<RegretRecord> run_experiment_seed(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  const DomainBox domain = config.effective_domain();
  const int d = config.dimension;
  const BoundObjective objective = make_objective(config, seed);

  std::vector<RegretRecord> records;

  // Sobol initialization, shared across policies for the same seed.
  const int n_init = config.effective_init_points();
  const Eigen::MatrixXd init_x = sobol_candidates(domain, n_init, derive_seed(seed, kInitStream));

  std::vector<Eigen::VectorXd> xs;
  std::vector<double> ys;
  std::vector<double> costs;
  double cumulative_cost = 0.0;
  double incumbent = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd incumbent_point;

  for (int i = 0; i < n_init; ++i) {
    const Eigen::VectorXd x = init_x.row(i).transpose();
    const double y = objective.value(x);
    const double c = true_cost(config, x);
    xs.push_back(x);
    ys.push_back(y);
    costs.push_back(c);
    cumulative_cost += c;
    if (y > incumbent) {
      incumbent = y;
      incumbent_point = x;
    }
  }
  if (!(config.budget > cumulative_cost))
    throw ConfigError("budget does not cover the initialization cost");

  PbgiDecayState decay{config.policy.lambda_initial, config.policy.beta, config.policy.lambda_initial, 0};
  const bool uses_lambda = config.policy.kind == PolicyKind::pbgi ||
                           config.policy.kind == PolicyKind::pbgi_d ||
                           config.policy.kind == PolicyKind::pbgi_u;
  double lambda_t = config.policy.kind == PolicyKind::pbgi_d ? decay.lambda_current
                                                             : config.policy.lambda;

  RegretRecord init_row;
  init_row.seed = seed;
  init_row.step = 0;
  init_row.cumulative_cost = cumulative_cost;
  init_row.step_cost = cumulative_cost;
  init_row.observed = incumbent;
  init_row.incumbent = incumbent;
  init_row.regret = objective.reference_optimum - incumbent;
  init_row.lambda_t = uses_lambda ? lambda_t : 0.0;
  init_row.point = incumbent_point;
  records.push_back(init_row);

  for (int t = 1; config.max_steps <= 0 || t <= config.max_steps; ++t) {
    const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
    Dataset data;
    data.inputs.resize(n, d);
    data.outputs.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      data.inputs.row(i) = xs[i].transpose();
      data.outputs[i] = ys[i];
    }

    // Non-stationary construction: fit a unit-amplitude stationary GP to
    // the envelope-divided outputs and rescale predictions afterwards.
    if (objective.envelope)
      for (Eigen::Index i = 0; i < n; ++i) data.outputs[i] /= objective.envelope(data.inputs(i, 0));

    const Standardization st = fit_standardization(data.outputs, config.standardize);
    data.outputs = (data.outputs.array() - st.mean) / st.scale;
    data.noise_variance = config.noise_variance / (st.scale * st.scale);

    KernelSpec surrogate_kernel = config.kernel;
    if (objective.envelope) surrogate_kernel.amplitude = 1.0;

    GpPosterior base = fit_posterior(surrogate_kernel, data);
    std::unique_ptr<PosteriorField> field;
    if (objective.envelope) {
      auto env = objective.envelope;
      auto denv = objective.envelope_derivative;
      field = std::make_unique<ScaledPosterior>(
          std::move(base), [env](const Eigen::VectorXd& x) { return env(x[0]); },
          [denv](const Eigen::VectorXd& x) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
            g[0] = denv(x[0]);
            return g;
          });
    } else {
      field = std::make_unique<GpPosterior>(std::move(base));
    }

    // Model-scale incumbent. With an envelope, observations are compared on
    // the raw scale, so the incumbent is standardized only.
    double model_incumbent;
    if (objective.envelope) {
      model_incumbent = incumbent;
    } else {
      model_incumbent = (incumbent - st.mean) / st.scale;
    }

    CostModel cost_model = CostModel::uniform(1.0);
    switch (config.cost.kind) {
      case CostKind::uniform:
        cost_model = CostModel::uniform(config.cost.uniform_value);
        break;
      case CostKind::linear:
      case CostKind::bump:
        cost_model = CostModel::known(
            [&config](const Eigen::VectorXd& x) { return true_cost(config, x); },
            [&config](const Eigen::VectorXd& x) { return true_cost_grad(config, x); });
        break;
      case CostKind::unknown: {
        Dataset cost_data;
        cost_data.inputs = data.inputs;
        cost_data.outputs = Eigen::Map<const Eigen::VectorXd>(costs.data(), n);
        KernelSpec cost_kernel = config.kernel;
        cost_kernel.amplitude = 1.0;
        auto log_post = std::make_shared<GpPosterior>(fit_log_cost_posterior(cost_kernel, cost_data));
        cost_model = CostModel::unknown(std::move(log_post));
        break;
      }
    }

    AcquisitionContext ctx;
    ctx.posterior = field.get();
    ctx.incumbent = model_incumbent;
    ctx.cost = std::move(cost_model);
    ctx.lambda = lambda_t;
    ctx.step = t;
    ctx.dimension = d;
    ctx.ucb_delta = config.policy.ucb_delta;

    std::shared_ptr<const ConditionedPath> ts_path;
    if (config.policy.kind == PolicyKind::thompson) {
      const GpPosterior* gp = dynamic_cast<const GpPosterior*>(field.get());
      FourierFeaturePath prior = sample_prior_path(surrogate_kernel, d, config.n_features,
                                                   derive_seed(seed, kThompsonStream, t));
      ts_path = std::make_shared<ConditionedPath>(*gp, std::move(prior));
    }

    const Acquisition acq = make_step_acquisition(config.policy.kind, ctx, ts_path);
    const OptimizeReport report = maximize(acq, domain, derive_seed(seed, kAcqStream, t),
                                           config.optimizer);

    if (config.policy.kind == PolicyKind::pbgi_d) {
      decay = pbgi_d_update(decay, report.best_value, model_incumbent);
    }

    const Eigen::VectorXd x_next = report.best_point;
    const double step_cost = true_cost(config, x_next);
    if (cumulative_cost + step_cost > config.budget) break;

    RegretRecord row;
    row.seed = seed;
    row.step = t;
    row.point = x_next;
    row.lambda_t = uses_lambda ? lambda_t : 0.0;
    try {
      row.observed = objective.value(x_next);
    } catch (const std::exception& e) {
      row.error = true;
      row.error_message = e.what();
      row.observed = std::numeric_limits<double>::quiet_NaN();
      row.cumulative_cost = cumulative_cost;
      row.incumbent = incumbent;
      row.regret = objective.reference_optimum - incumbent;
      records.push_back(std::move(row));
      break;
    }
    cumulative_cost += step_cost;
    xs.push_back(x_next);
    ys.push_back(row.observed);
    costs.push_back(step_cost);
    if (row.observed > incumbent) incumbent = row.observed;

    row.step_cost = step_cost;
    row.cumulative_cost = cumulative_cost;
    row.incumbent = incumbent;
    row.regret = objective.reference_optimum - incumbent;
    records.push_back(std::move(row));

    if (config.policy.kind == PolicyKind::pbgi_d) lambda_t = decay.lambda_current;
  }

  return records;
}

std::vector<std::vector<RegretRecord>> run_experiment(const ExperimentConfig& config, int jobs) {
  config.validate();
  const std::size_t n = config.seeds.size();
  std::vector<std::vector<RegretRecord>> results(n);
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = run_experiment_seed(config, config.seeds[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const int n_workers = std::min<std::size_t>(jobs, n);
  std::vector<std::exception_ptr> errors(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w] {
      try {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) break;
          results[i] = run_experiment_seed(config, config.seeds[i]);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
  return results;
}

}  // namespace pbo
