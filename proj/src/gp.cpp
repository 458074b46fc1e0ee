#include "pbo/gp.hpp"

#include <cmath>

namespace pbo {

GpPosterior fit_posterior(const KernelSpec& kernel, const Dataset& data) {
  kernel.validate();
  data.validate();

  GpPosterior post;
  post.kernel_ = kernel;
  post.data_ = data;
  if (data.size() == 0) return post;

  const Eigen::Index n = data.size();
  Eigen::MatrixXd gram = kernel_matrix(kernel, data.inputs, data.inputs);
  gram.diagonal().array() += data.noise_variance;

  const double amp2 = kernel.amplitude * kernel.amplitude;
  double jitter = kernel.jitter * amp2;
  const double jitter_max = 1e-4 * amp2;
  while (true) {
    Eigen::MatrixXd stabilized = gram;
    stabilized.diagonal().array() += jitter;
    post.llt_.compute(stabilized);
    if (post.llt_.info() == Eigen::Success) break;
    jitter *= 10.0;
    if (jitter > jitter_max)
      throw FactorizationError("fit_posterior: covariance not positive definite after jitter escalation");
  }
  post.jitter_used_ = jitter;
  post.alpha_ = post.llt_.solve(data.outputs);
  (void)n;
  return post;
}

GpPosterior fit_log_cost_posterior(const KernelSpec& kernel, const Dataset& cost_data) {
  cost_data.validate();
  Dataset log_data = cost_data;
  for (Eigen::Index i = 0; i < cost_data.size(); ++i) {
    if (!(cost_data.outputs[i] > 0.0))
      throw std::invalid_argument("fit_log_cost_posterior: observed costs must be strictly positive");
    log_data.outputs[i] = std::log(cost_data.outputs[i]);
  }
  return fit_posterior(kernel, log_data);
}

Eigen::VectorXd GpPosterior::solve_gram(const Eigen::Ref<const Eigen::VectorXd>& rhs) const {
  return llt_.solve(rhs);
}

Eigen::VectorXd GpPosterior::cross_covariance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd k(data_.size());
  for (Eigen::Index i = 0; i < data_.size(); ++i)
    k[i] = kernel_value(kernel_, x, data_.inputs.row(i).transpose());
  return k;
}

MeanStd GpPosterior::mean_std(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double prior_var = kernel_.amplitude * kernel_.amplitude;
  if (data_.size() == 0) return {0.0, kernel_.amplitude};

  const Eigen::VectorXd kstar = cross_covariance(x);
  const double mean = kstar.dot(alpha_);
  const double var = prior_var - kstar.dot(llt_.solve(kstar));
  return {mean, std::sqrt(std::max(var, 0.0))};
}

MeanStdGradients GpPosterior::mean_std_gradients(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::Index d = x.size();
  MeanStdGradients out;
  if (data_.size() == 0) {
    out.mean = Eigen::VectorXd::Zero(d);
    out.std = Eigen::VectorXd::Zero(d);
    return out;
  }

  Eigen::MatrixXd jac(data_.size(), d);  // row i: grad_x k(x, x_i)
  for (Eigen::Index i = 0; i < data_.size(); ++i)
    jac.row(i) = kernel_grad_x(kernel_, x, data_.inputs.row(i).transpose()).transpose();

  out.mean = jac.transpose() * alpha_;

  const Eigen::VectorXd kstar = cross_covariance(x);
  const Eigen::VectorXd kinv_kstar = llt_.solve(kstar);
  const double prior_var = kernel_.amplitude * kernel_.amplitude;
  const double var = prior_var - kstar.dot(kinv_kstar);
  const double std = std::sqrt(std::max(var, 0.0));
  if (std <= 0.0) {
    out.std = Eigen::VectorXd::Zero(d);
    out.std_grad_defined = false;
    return out;
  }
  out.std = (-jac.transpose() * kinv_kstar) / std;
  return out;
}

MeanStd ScaledPosterior::mean_std(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const MeanStd base = base_.mean_std(x);
  const double a = scale_(x);
  return {a * base.mean, std::abs(a) * base.std};
}

MeanStdGradients ScaledPosterior::mean_std_gradients(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const MeanStd base = base_.mean_std(x);
  MeanStdGradients g = base_.mean_std_gradients(x);
  const double a = scale_(x);
  const Eigen::VectorXd da = scale_grad_(x);
  MeanStdGradients out;
  out.mean = a * g.mean + base.mean * da;
  out.std_grad_defined = g.std_grad_defined;
  if (g.std_grad_defined)
    out.std = a * g.std + base.std * da;
  else
    out.std = Eigen::VectorXd::Zero(x.size());
  return out;
}

}  // namespace pbo
