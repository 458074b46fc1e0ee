#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <functional>
#include <stdexcept>

#include "pbo/kernels.hpp"

namespace pbo {

/// Thrown when the training covariance cannot be factorized even after
/// jitter escalation.
struct FactorizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Dataset {
  Eigen::MatrixXd inputs;   // n x d
  Eigen::VectorXd outputs;  // n
  double noise_variance = 0.0;

  Eigen::Index size() const { return outputs.size(); }
  Eigen::Index dim() const { return inputs.cols(); }

  void validate() const {
    if (inputs.rows() != outputs.size())
      throw std::invalid_argument("Dataset: inputs and outputs must have equal length");
    if (noise_variance < 0.0) throw std::invalid_argument("Dataset: noise variance must be nonnegative");
  }
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Gradients of the posterior mean and standard deviation. When the
/// standard deviation is numerically zero its gradient is undefined and
/// `std_grad_defined` is false; callers must handle that case explicitly.
struct MeanStdGradients {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  bool std_grad_defined = true;
};

/// Read-only view of a posterior surrogate: mean/std fields with gradients.
class PosteriorField {
 public:
  virtual ~PosteriorField() = default;
  virtual MeanStd mean_std(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
  virtual MeanStdGradients mean_std_gradients(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;
};

/// Exact zero-mean Gaussian process posterior. Immutable after
/// construction and safe to share across threads.
class GpPosterior : public PosteriorField {
 public:
  GpPosterior() = default;

  MeanStd mean_std(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  MeanStdGradients mean_std_gradients(const Eigen::Ref<const Eigen::VectorXd>& x) const override;

  const KernelSpec& kernel() const { return kernel_; }
  const Dataset& data() const { return data_; }
  bool has_data() const { return data_.size() > 0; }
  double jitter_used() const { return jitter_used_; }

  /// Solves (K + (noise + jitter) I) v = rhs against the cached factorization.
  Eigen::VectorXd solve_gram(const Eigen::Ref<const Eigen::VectorXd>& rhs) const;

  /// Covariance vector k(x, X) against the training inputs.
  Eigen::VectorXd cross_covariance(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  friend GpPosterior fit_posterior(const KernelSpec&, const Dataset&);

  KernelSpec kernel_;
  Dataset data_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;  // K^{-1} y
  double jitter_used_ = 0.0;
};

/// Exact GP conditioning. Empty data yields the prior (mean 0, std = amplitude).
/// Jitter escalates from kernel.jitter * amplitude^2 by factors of 10 up to
/// 1e-4 * amplitude^2 before failing with FactorizationError.
GpPosterior fit_posterior(const KernelSpec& kernel, const Dataset& data);

/// Posterior over ln(cost). All observed costs must be strictly positive.
GpPosterior fit_log_cost_posterior(const KernelSpec& kernel, const Dataset& cost_data);

/// Posterior with a pointwise output scale a(x): mean and std are multiplied
/// by a(x), with gradients combined by the product rule. Used for
/// non-stationary amplitude constructions; wraps a stationary posterior
/// fitted to outputs divided by a(x).
class ScaledPosterior : public PosteriorField {
 public:
  using ScaleFn = std::function<double(const Eigen::VectorXd&)>;
  using ScaleGradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  ScaledPosterior(GpPosterior base, ScaleFn scale, ScaleGradFn scale_grad)
      : base_(std::move(base)), scale_(std::move(scale)), scale_grad_(std::move(scale_grad)) {}

  MeanStd mean_std(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  MeanStdGradients mean_std_gradients(const Eigen::Ref<const Eigen::VectorXd>& x) const override;

  const GpPosterior& base() const { return base_; }

 private:
  GpPosterior base_;
  ScaleFn scale_;
  ScaleGradFn scale_grad_;
};

}  // namespace pbo
