#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>

#include "pbo/errors.hpp"
#include "pbo/gp.hpp"
#include "pbo/rff.hpp"

namespace pbo {

struct GradientUndefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CostModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluation-cost model: a known positive cost function with gradient, an
/// unknown cost modeled by a log-cost GP posterior, or a uniform constant.
class CostModel {
 public:
  enum class Kind { uniform, known, unknown };

  using CostFn = std::function<double(const Eigen::VectorXd&)>;
  using CostGradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  static CostModel uniform(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("CostModel: uniform cost must be positive");
    CostModel m;
    m.kind_ = Kind::uniform;
    m.uniform_ = c;
    return m;
  }

  static CostModel known(CostFn cost, CostGradFn grad) {
    CostModel m;
    m.kind_ = Kind::known;
    m.cost_ = std::move(cost);
    m.cost_grad_ = std::move(grad);
    return m;
  }

  static CostModel unknown(std::shared_ptr<const PosteriorField> log_cost_posterior) {
    CostModel m;
    m.kind_ = Kind::unknown;
    m.log_cost_ = std::move(log_cost_posterior);
    return m;
  }

  Kind kind() const { return kind_; }

  /// Expected cost at x: c(x) for known costs, the constant for uniform,
  /// and the log-normal mean exp(mu_lnc + sigma_lnc^2 / 2) for unknown.
  double expected_cost(const Eigen::VectorXd& x) const;
  Eigen::VectorXd expected_cost_grad(const Eigen::VectorXd& x) const;

 private:
  Kind kind_ = Kind::uniform;
  double uniform_ = 1.0;
  CostFn cost_;
  CostGradFn cost_grad_;
  std::shared_ptr<const PosteriorField> log_cost_;
};

/// Everything an acquisition function reads at one step.
struct AcquisitionContext {
  const PosteriorField* posterior = nullptr;
  double incumbent = 0.0;  // best observed value f*
  CostModel cost = CostModel::uniform(1.0);
  double lambda = 1e-4;
  int step = 1;       // t >= 1
  int dimension = 1;  // d, read by the UCB schedule
  double ucb_delta = 0.1;
};

/// Expected improvement over the incumbent (closed form).
double ei(const AcquisitionContext& ctx, const Eigen::VectorXd& x);
Eigen::VectorXd ei_grad(const AcquisitionContext& ctx, const Eigen::VectorXd& x);

/// Expected improvement per unit (expected) cost.
double eipc(const AcquisitionContext& ctx, const Eigen::VectorXd& x);
Eigen::VectorXd eipc_grad(const AcquisitionContext& ctx, const Eigen::VectorXd& x);

/// GP-UCB with the schedule beta_t = 2 log(d t^2 pi^2 / (6 delta)),
/// scaled down by a factor of 5: ucb = mu + sqrt(beta_t / 5) * sigma.
double ucb(const AcquisitionContext& ctx, const Eigen::VectorXd& x);
Eigen::VectorXd ucb_grad(const AcquisitionContext& ctx, const Eigen::VectorXd& x);
double ucb_beta(int t, int dimension, double delta);

/// Pandora's Box Gittins index acquisition: the unique g solving
/// EI_{posterior}(x; g) = lambda * c(x). The sigma = 0 case returns the
/// exact linear-tail root mu - lambda * c(x).
double pbgi(const AcquisitionContext& ctx, const Eigen::VectorXd& x);

/// Analytic gradient of pbgi. Requires sigma(x) > 0; throws
/// GradientUndefined otherwise (the optimizer excludes such points).
Eigen::VectorXd pbgi_grad(const AcquisitionContext& ctx, const Eigen::VectorXd& x);

/// Unknown-cost variant: pbgi with the cost replaced by the log-normal
/// posterior mean. Requires an unknown cost model.
double pbgi_u(const AcquisitionContext& ctx, const Eigen::VectorXd& x);
Eigen::VectorXd pbgi_u_grad(const AcquisitionContext& ctx, const Eigen::VectorXd& x);

/// State of the dynamic lambda decay: lambda is multiplied by beta each
/// time the Pandora's Box stopping rule fires.
struct PbgiDecayState {
  double lambda_current = 0.1;
  double beta = 0.5;
  double lambda_initial = 0.1;
  int triggers = 0;
};

/// Applies the decay rule: if the incumbent meets the maximized acquisition
/// value (ties included), the stopping rule fires and lambda decays.
PbgiDecayState pbgi_d_update(const PbgiDecayState& state, double max_acq_value, double incumbent);

/// Thompson sampling objective: the value of a posterior sample path.
double thompson_objective(const ConditionedPath& path, const Eigen::VectorXd& x);

}  // namespace pbo
