#include "pbo/acquisition.hpp"

#include <cmath>

#include "pbo/errors.hpp"
#include "pbo/math_util.hpp"
#include "pbo/root_finding.hpp"

namespace pbo {

double CostModel::expected_cost(const Eigen::VectorXd& x) const {
  switch (kind_) {
    case Kind::uniform:
      return uniform_;
    case Kind::known: {
      const double c = cost_(x);
      if (!(c > 0.0)) throw CostModelError("CostModel: known cost must be positive");
      return c;
    }
    case Kind::unknown: {
      const MeanStd ln = log_cost_->mean_std(x);
      return std::exp(ln.mean + 0.5 * ln.std * ln.std);
    }
  }
  return uniform_;
}

Eigen::VectorXd CostModel::expected_cost_grad(const Eigen::VectorXd& x) const {
  switch (kind_) {
    case Kind::uniform:
      return Eigen::VectorXd::Zero(x.size());
    case Kind::known:
      return cost_grad_(x);
    case Kind::unknown: {
      const MeanStd ln = log_cost_->mean_std(x);
      const MeanStdGradients g = log_cost_->mean_std_gradients(x);
      const double c = std::exp(ln.mean + 0.5 * ln.std * ln.std);
      Eigen::VectorXd inner = g.mean;
      if (g.std_grad_defined) inner += ln.std * g.std;
      return c * inner;
    }
  }
  return Eigen::VectorXd::Zero(x.size());
}

double ei(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  const MeanStd ms = ctx.posterior->mean_std(x);
  return gaussian_ei(ms.mean, ms.std, ctx.incumbent);
}

Eigen::VectorXd ei_grad(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  const MeanStd ms = ctx.posterior->mean_std(x);
  const MeanStdGradients g = ctx.posterior->mean_std_gradients(x);
  if (ms.std <= 0.0 || !g.std_grad_defined)
    throw GradientUndefined("ei_grad: sigma is numerically zero");
  const double z = (ms.mean - ctx.incumbent) / ms.std;
  return normal_cdf(z) * g.mean + normal_pdf(z) * g.std;
}

double eipc(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  const double c = ctx.cost.expected_cost(x);
  if (!(c > 0.0)) throw CostModelError("eipc: cost must be positive");
  return ei(ctx, x) / c;
}

Eigen::VectorXd eipc_grad(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  const double c = ctx.cost.expected_cost(x);
  if (!(c > 0.0)) throw CostModelError("eipc_grad: cost must be positive");
  const Eigen::VectorXd dei = ei_grad(ctx, x);
  const Eigen::VectorXd dc = ctx.cost.expected_cost_grad(x);
  return (dei - (ei(ctx, x) / c) * dc) / c;
}

double ucb_beta(int t, int dimension, double delta) {
  return 2.0 * std::log(dimension * static_cast<double>(t) * t * M_PI * M_PI / (6.0 * delta));
}

double ucb(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  const MeanStd ms = ctx.posterior->mean_std(x);
  const double beta = ucb_beta(ctx.step, ctx.dimension, ctx.ucb_delta);
  return ms.mean + std::sqrt(beta / 5.0) * ms.std;
}

Eigen::VectorXd ucb_grad(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  const MeanStdGradients g = ctx.posterior->mean_std_gradients(x);
  if (!g.std_grad_defined) throw GradientUndefined("ucb_grad: sigma is numerically zero");
  const double beta = ucb_beta(ctx.step, ctx.dimension, ctx.ucb_delta);
  return g.mean + std::sqrt(beta / 5.0) * g.std;
}

namespace {

double solve_fair_price(double mean, double std, double target) {
  if (std <= 0.0) return mean - target;  // exact linear tail of EI
  const double root = bisect_decreasing(
      [&](double g) { return gaussian_ei(mean, std, g) - target; }, mean - std, mean + std);
  if (std::abs(gaussian_ei(mean, std, root) - target) > 1e-10 * (1.0 + target))
    throw NumericalError("pbgi: root residual above tolerance");
  return root;
}

}  // namespace

double pbgi(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  const double target = ctx.lambda * ctx.cost.expected_cost(x);
  if (!(target > 0.0)) throw std::invalid_argument("pbgi: lambda * cost must be positive");
  const MeanStd ms = ctx.posterior->mean_std(x);
  return solve_fair_price(ms.mean, ms.std, target);
}

Eigen::VectorXd pbgi_grad(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  const MeanStd ms = ctx.posterior->mean_std(x);
  if (ms.std <= 0.0) throw GradientUndefined("pbgi_grad: sigma is numerically zero");
  const MeanStdGradients g = ctx.posterior->mean_std_gradients(x);
  if (!g.std_grad_defined) throw GradientUndefined("pbgi_grad: sigma gradient undefined");

  const double target = ctx.lambda * ctx.cost.expected_cost(x);
  const double alpha = solve_fair_price(ms.mean, ms.std, target);
  const double z = (ms.mean - alpha) / ms.std;
  const Eigen::VectorXd dc = ctx.cost.expected_cost_grad(x);
  return g.mean + (normal_pdf(z) * g.std - ctx.lambda * dc) / normal_cdf(z);
}

double pbgi_u(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  if (ctx.cost.kind() != CostModel::Kind::unknown)
    throw CostModelError("pbgi_u: requires an unknown cost model");
  return pbgi(ctx, x);
}

Eigen::VectorXd pbgi_u_grad(const AcquisitionContext& ctx, const Eigen::VectorXd& x) {
  if (ctx.cost.kind() != CostModel::Kind::unknown)
    throw CostModelError("pbgi_u_grad: requires an unknown cost model");
  return pbgi_grad(ctx, x);
}

PbgiDecayState pbgi_d_update(const PbgiDecayState& state, double max_acq_value, double incumbent) {
  PbgiDecayState next = state;
  if (incumbent >= max_acq_value) {
    next.lambda_current = state.lambda_current * state.beta;
    next.triggers = state.triggers + 1;
  }
  return next;
}

double thompson_objective(const ConditionedPath& path, const Eigen::VectorXd& x) {
  return path.value(x);
}

}  // namespace pbo
