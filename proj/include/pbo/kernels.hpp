#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace pbo {

enum class KernelFamily { matern32, matern52, squared_exponential };

KernelFamily kernel_family_from_string(const std::string& name);
std::string to_string(KernelFamily family);

/// Stationary covariance model k(x, x') = amplitude^2 * rho(||x - x'|| / lengthscale).
/// `jitter` is the relative diagonal stabilizer: jitter * amplitude^2 is added
/// to the training covariance diagonal before factorization.
struct KernelSpec {
  KernelFamily family = KernelFamily::matern52;
  double lengthscale = 0.1;
  double amplitude = 1.0;
  double jitter = 1e-8;

  void validate() const {
    if (!(lengthscale > 0.0)) throw std::invalid_argument("KernelSpec: lengthscale must be positive");
    if (!(amplitude > 0.0)) throw std::invalid_argument("KernelSpec: amplitude must be positive");
    if (!(jitter > 0.0)) throw std::invalid_argument("KernelSpec: jitter must be positive");
  }
};

/// k(x, y).
double kernel_value(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y);

/// Gradient of k(x, y) with respect to x. Smooth for Matern-5/2 and the
/// squared exponential; for Matern-3/2 the continuous extension through
/// x = y is returned.
Eigen::VectorXd kernel_grad_x(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& y);

/// Dense covariance matrix between row sets A (n x d) and B (m x d).
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// One draw from the kernel's spectral density (frequency of a unit-amplitude
/// stationary process). Matern frequencies are scaled multivariate-t draws
/// with 2*nu degrees of freedom; squared-exponential frequencies are Gaussian.
Eigen::VectorXd sample_spectral_frequency(const KernelSpec& spec, int dim, std::mt19937_64& rng);

}  // namespace pbo
