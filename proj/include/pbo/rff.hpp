#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "pbo/gp.hpp"
#include "pbo/kernels.hpp"

namespace pbo {

/// Random-Fourier-feature draw from a stationary GP prior. Evaluation is a
/// deterministic function of the stored draws; the empirical covariance of
/// many paths converges to the kernel.
class FourierFeaturePath {
 public:
  FourierFeaturePath() = default;
  FourierFeaturePath(Eigen::MatrixXd frequencies, Eigen::VectorXd phases, Eigen::VectorXd weights,
                     double amplitude);

  double value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Values at each row of X (n x d).
  Eigen::VectorXd value_batch(const Eigen::MatrixXd& x) const;

  int n_features() const { return static_cast<int>(phases_.size()); }
  int dim() const { return static_cast<int>(frequencies_.cols()); }
  const Eigen::MatrixXd& frequencies() const { return frequencies_; }
  const Eigen::VectorXd& phases() const { return phases_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double amplitude() const { return amplitude_; }

 private:
  Eigen::MatrixXd frequencies_;  // m x d, spectral draws
  Eigen::VectorXd phases_;       // m, uniform on [0, 2*pi)
  Eigen::VectorXd weights_;      // m, standard normal
  double amplitude_ = 1.0;
};

/// Draws a prior path with `n_features` Fourier features. The same seed
/// yields an identical path.
FourierFeaturePath sample_prior_path(const KernelSpec& kernel, int dim, int n_features,
                                     std::uint64_t seed);

/// Prior path conditioned on a posterior's data by pathwise (Matheron)
/// update: value(x) = prior(x) + k(x,X) K^{-1} (y - prior(X)).
/// Deterministic given (path, data); interpolates noiseless observations.
class ConditionedPath {
 public:
  ConditionedPath(const GpPosterior& posterior, FourierFeaturePath prior);

  double value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  const FourierFeaturePath& prior() const { return prior_; }

 private:
  const GpPosterior* posterior_;
  FourierFeaturePath prior_;
  Eigen::VectorXd residual_weights_;  // K^{-1} (y - prior(X))
};

}  // namespace pbo
