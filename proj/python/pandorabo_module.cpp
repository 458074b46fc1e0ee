#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pbo/acquisition.hpp"
#include "pbo/config.hpp"
#include "pbo/csv.hpp"
#include "pbo/experiment.hpp"
#include "pbo/gp.hpp"
#include "pbo/objectives.hpp"
#include "pbo/optimize.hpp"
#include "pbo/pandora.hpp"
#include "pbo/rff.hpp"
#include "pbo/sobol.hpp"
#include "pbo/verify.hpp"

namespace py = pybind11;
using namespace pbo;

namespace {

RewardDistribution reward_from_py(const py::object& spec) {
  // ("gaussian", mean, std) or [(value, prob), ...]
  if (py::isinstance<py::tuple>(spec) && py::len(spec) == 3 &&
      py::isinstance<py::str>(py::tuple(spec)[0])) {
    const py::tuple t(spec);
    return RewardDistribution::gaussian(t[1].cast<double>(), t[2].cast<double>());
  }
  std::vector<Atom> atoms;
  for (const auto& item : spec) {
    const py::tuple t = item.cast<py::tuple>();
    atoms.push_back({t[0].cast<double>(), t[1].cast<double>()});
  }
  return RewardDistribution::finite(std::move(atoms));
}

PandoraInstance instance_from_py(const py::list& boxes, py::object budget) {
  PandoraInstance instance;
  int id = 0;
  for (const auto& item : boxes) {
    const py::tuple t = item.cast<py::tuple>();  // (reward_spec, cost)
    PandoraBox box;
    box.id = id++;
    box.reward = reward_from_py(t[0]);
    box.cost = t[1].cast<double>();
    instance.boxes.push_back(std::move(box));
  }
  if (!budget.is_none()) instance.budget = budget.cast<double>();
  instance.validate();
  return instance;
}

}  // namespace

PYBIND11_MODULE(pandorabo, m) {
  m.doc() = "Cost-aware Bayesian optimization with Pandora's Box Gittins indices";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<UnsupportedError>(m, "UnsupportedError");
  py::register_exception<NumericalError>(m, "NumericalError");

  // --- Gaussian process core -------------------------------------------
  py::enum_<KernelFamily>(m, "KernelFamily")
      .value("matern32", KernelFamily::matern32)
      .value("matern52", KernelFamily::matern52)
      .value("squared_exponential", KernelFamily::squared_exponential);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def(py::init([](const std::string& family, double lengthscale, double amplitude,
                       double jitter) {
             KernelSpec spec;
             spec.family = kernel_family_from_string(family);
             spec.lengthscale = lengthscale;
             spec.amplitude = amplitude;
             spec.jitter = jitter;
             spec.validate();
             return spec;
           }),
           py::arg("family") = "matern52", py::arg("lengthscale") = 0.1,
           py::arg("amplitude") = 1.0, py::arg("jitter") = 1e-8)
      .def_readonly("lengthscale", &KernelSpec::lengthscale)
      .def_readonly("amplitude", &KernelSpec::amplitude);

  py::class_<GpPosterior, std::shared_ptr<GpPosterior>>(m, "GpPosterior")
      .def("mean_std",
           [](const GpPosterior& gp, const Eigen::VectorXd& x) {
             const MeanStd ms = gp.mean_std(x);
             return py::make_tuple(ms.mean, ms.std);
           })
      .def("mean_std_gradients", [](const GpPosterior& gp, const Eigen::VectorXd& x) {
        const MeanStdGradients g = gp.mean_std_gradients(x);
        return py::make_tuple(g.mean, g.std, g.std_grad_defined);
      });

  m.def(
      "fit_posterior",
      [](const KernelSpec& kernel, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
         double noise_variance) {
        Dataset data{inputs, outputs, noise_variance};
        return std::make_shared<GpPosterior>(fit_posterior(kernel, data));
      },
      py::arg("kernel"), py::arg("inputs"), py::arg("outputs"), py::arg("noise_variance") = 0.0);

  m.def(
      "fit_log_cost_posterior",
      [](const KernelSpec& kernel, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& costs,
         double noise_variance) {
        Dataset data{inputs, costs, noise_variance};
        return std::make_shared<GpPosterior>(fit_log_cost_posterior(kernel, data));
      },
      py::arg("kernel"), py::arg("inputs"), py::arg("costs"), py::arg("noise_variance") = 0.0);

  py::class_<FourierFeaturePath>(m, "FourierFeaturePath")
      .def("value", [](const FourierFeaturePath& p, const Eigen::VectorXd& x) { return p.value(x); })
      .def("value_batch", &FourierFeaturePath::value_batch)
      .def("gradient",
           [](const FourierFeaturePath& p, const Eigen::VectorXd& x) { return p.gradient(x); });

  m.def("sample_prior_path", &sample_prior_path, py::arg("kernel"), py::arg("dim"),
        py::arg("n_features"), py::arg("seed"));

  // --- Pandora's Box ----------------------------------------------------
  m.def(
      "gittins_index",
      [](const py::object& reward, double cost) { return gittins_index(reward_from_py(reward), cost); },
      py::arg("reward"), py::arg("cost"),
      "Fair price g solving E max(0, f - g) = cost. Rewards: ('gaussian', mean, std) "
      "or [(value, prob), ...].");

  m.def(
      "expected_improvement",
      [](const py::object& reward, double y) { return reward_from_py(reward).expected_improvement(y); },
      py::arg("reward"), py::arg("y"));

  m.def(
      "brute_force_value",
      [](const py::list& boxes) { return brute_force_value(instance_from_py(boxes, py::none())); },
      py::arg("boxes"));

  m.def(
      "gittins_policy_value",
      [](const py::list& boxes, const std::string& tie_rule) {
        const TieRule rule = tie_rule == "open-on-tie" ? TieRule::open_on_tie : TieRule::stop_early;
        return evaluate_gittins_policy(instance_from_py(boxes, py::none()), rule).net_value;
      },
      py::arg("boxes"), py::arg("tie_rule") = "stop-early");

  m.def(
      "budget_lambda",
      [](const py::list& boxes, double budget) {
        const MixedBudgetPolicy mixed = budget_lambda(instance_from_py(boxes, py::none()), budget);
        py::dict out;
        out["lambda_star"] = mixed.lambda_star;
        out["alpha"] = mixed.alpha;
        out["expected_spend"] = mixed.expected_spend;
        out["expected_value"] = mixed.expected_value;
        out["lagrangian_min"] = mixed.lagrangian_min;
        return out;
      },
      py::arg("boxes"), py::arg("budget"));

  // --- Acquisition functions --------------------------------------------
  auto make_ctx = [](std::shared_ptr<GpPosterior> posterior, double incumbent, double lam,
                     double cost, int step, int dimension) {
    auto ctx = std::make_shared<AcquisitionContext>();
    ctx->posterior = posterior.get();
    ctx->incumbent = incumbent;
    ctx->lambda = lam;
    ctx->cost = CostModel::uniform(cost);
    ctx->step = step;
    ctx->dimension = dimension;
    return std::make_pair(ctx, posterior);
  };

  m.def(
      "ei",
      [make_ctx](std::shared_ptr<GpPosterior> posterior, double incumbent, const Eigen::VectorXd& x) {
        auto [ctx, keep] = make_ctx(posterior, incumbent, 1e-4, 1.0, 1, static_cast<int>(x.size()));
        return ei(*ctx, x);
      },
      py::arg("posterior"), py::arg("incumbent"), py::arg("x"));

  m.def(
      "ucb",
      [make_ctx](std::shared_ptr<GpPosterior> posterior, int t, const Eigen::VectorXd& x,
                 double delta) {
        auto [ctx, keep] = make_ctx(posterior, 0.0, 1e-4, 1.0, t, static_cast<int>(x.size()));
        ctx->ucb_delta = delta;
        return ucb(*ctx, x);
      },
      py::arg("posterior"), py::arg("t"), py::arg("x"), py::arg("delta") = 0.1);

  m.def(
      "pbgi",
      [make_ctx](std::shared_ptr<GpPosterior> posterior, double lam, double cost,
                 const Eigen::VectorXd& x) {
        auto [ctx, keep] = make_ctx(posterior, 0.0, lam, cost, 1, static_cast<int>(x.size()));
        return pbgi(*ctx, x);
      },
      py::arg("posterior"), py::arg("lambda_"), py::arg("cost"), py::arg("x"));

  m.def(
      "pbgi_grad",
      [make_ctx](std::shared_ptr<GpPosterior> posterior, double lam, double cost,
                 const Eigen::VectorXd& x) {
        auto [ctx, keep] = make_ctx(posterior, 0.0, lam, cost, 1, static_cast<int>(x.size()));
        return pbgi_grad(*ctx, x);
      },
      py::arg("posterior"), py::arg("lambda_"), py::arg("cost"), py::arg("x"));

  // --- Optimization and objectives ---------------------------------------
  m.def(
      "sobol",
      [](int dim, int n, std::uint64_t scramble_seed) {
        SobolSequence seq(dim, scramble_seed);
        return seq.take(n);
      },
      py::arg("dim"), py::arg("n"), py::arg("scramble_seed") = 0,
      "Sobol points in [0,1)^d; scramble_seed=0 yields the raw sequence.");

  m.def("ackley", &ackley);
  m.def("levy", &levy);
  m.def("rosenbrock", &rosenbrock);
  m.def(
      "linear_cost",
      [](const Eigen::VectorXd& x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
        DomainBox domain{lower, upper};
        return linear_cost(x, domain);
      },
      py::arg("x"), py::arg("lower"), py::arg("upper"));

  // --- Experiments --------------------------------------------------------
  m.def(
      "run_experiment_csv",
      [](const std::string& config_json, int jobs) {
        const ExperimentConfig config = parse_experiment_config(config_json);
        const auto per_seed = run_experiment(config, jobs);
        return records_to_csv(per_seed, config.dimension);
      },
      py::arg("config_json"), py::arg("jobs") = 1,
      "Runs an experiment config (JSON text) and returns the trace CSV.");

  m.def(
      "pandora_verify",
      [](int instances, int budget_instances, std::uint64_t seed) {
        const OptimalityReport optimality = run_optimality_suite(instances, seed);
        const BudgetSuiteReport budget = run_budget_suite(budget_instances, seed + 1);
        py::dict out;
        out["max_residual"] = optimality.max_residual;
        out["optimality_pass"] = optimality.pass;
        out["budget_pass"] = budget.pass;
        return out;
      },
      py::arg("instances") = 50, py::arg("budget_instances") = 10,
      py::arg("seed") = 20240517ULL);
}
