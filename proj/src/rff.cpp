#include "pbo/rff.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pbo {

FourierFeaturePath::FourierFeaturePath(Eigen::MatrixXd frequencies, Eigen::VectorXd phases,
                                       Eigen::VectorXd weights, double amplitude)
    : frequencies_(std::move(frequencies)),
      phases_(std::move(phases)),
      weights_(std::move(weights)),
      amplitude_(amplitude) {}

double FourierFeaturePath::value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double scale = amplitude_ * std::sqrt(2.0 / n_features());
  const Eigen::VectorXd proj = frequencies_ * x + phases_;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < proj.size(); ++i) acc += weights_[i] * std::cos(proj[i]);
  return scale * acc;
}

Eigen::VectorXd FourierFeaturePath::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double scale = amplitude_ * std::sqrt(2.0 / n_features());
  const Eigen::VectorXd proj = frequencies_ * x + phases_;
  Eigen::VectorXd coeff(proj.size());
  for (Eigen::Index i = 0; i < proj.size(); ++i) coeff[i] = -weights_[i] * std::sin(proj[i]);
  return scale * (frequencies_.transpose() * coeff);
}

Eigen::VectorXd FourierFeaturePath::value_batch(const Eigen::MatrixXd& x) const {
  const double scale = amplitude_ * std::sqrt(2.0 / n_features());
  Eigen::MatrixXd proj = x * frequencies_.transpose();  // n x m
  proj.rowwise() += phases_.transpose();
  return scale * (proj.array().cos().matrix() * weights_);
}

FourierFeaturePath sample_prior_path(const KernelSpec& kernel, int dim, int n_features,
                                     std::uint64_t seed) {
  kernel.validate();
  if (n_features < 1) throw std::invalid_argument("sample_prior_path: n_features must be >= 1");
  if (dim < 1) throw std::invalid_argument("sample_prior_path: dim must be >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * M_PI);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd freqs(n_features, dim);
  for (int i = 0; i < n_features; ++i) freqs.row(i) = sample_spectral_frequency(kernel, dim, rng).transpose();
  Eigen::VectorXd phases(n_features);
  for (int i = 0; i < n_features; ++i) phases[i] = uniform(rng);
  Eigen::VectorXd weights(n_features);
  for (int i = 0; i < n_features; ++i) weights[i] = normal(rng);

  return FourierFeaturePath(std::move(freqs), std::move(phases), std::move(weights), kernel.amplitude);
}

ConditionedPath::ConditionedPath(const GpPosterior& posterior, FourierFeaturePath prior)
    : posterior_(&posterior), prior_(std::move(prior)) {
  const Dataset& data = posterior.data();
  if (data.size() == 0) {
    residual_weights_.resize(0);
    return;
  }
  Eigen::VectorXd residual = data.outputs - prior_.value_batch(data.inputs);
  residual_weights_ = posterior.solve_gram(residual);
}

double ConditionedPath::value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double v = prior_.value(x);
  if (residual_weights_.size() > 0) v += posterior_->cross_covariance(x).dot(residual_weights_);
  return v;
}

Eigen::VectorXd ConditionedPath::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd g = prior_.gradient(x);
  if (residual_weights_.size() > 0) {
    const Dataset& data = posterior_->data();
    for (Eigen::Index i = 0; i < data.size(); ++i)
      g += residual_weights_[i] * kernel_grad_x(posterior_->kernel(), x, data.inputs.row(i).transpose());
  }
  return g;
}

}  // namespace pbo
