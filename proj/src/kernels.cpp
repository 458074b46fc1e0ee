#include "pbo/kernels.hpp"

#include <cmath>
#include <random>

namespace pbo {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935274463;
constexpr double kSqrt5 = 2.2360679774997896964091737;

// Correlation rho(r) for unit lengthscale.
double correlation(KernelFamily family, double r) {
  switch (family) {
    case KernelFamily::matern32:
      return (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r);
    case KernelFamily::matern52:
      return (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r) * std::exp(-kSqrt5 * r);
    case KernelFamily::squared_exponential:
      return std::exp(-0.5 * r * r);
  }
  return 0.0;
}

// rho'(r) / r, extended continuously through r = 0.
double radial_slope(KernelFamily family, double r) {
  switch (family) {
    case KernelFamily::matern32:
      return -3.0 * std::exp(-kSqrt3 * r);
    case KernelFamily::matern52:
      return -(5.0 / 3.0) * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
    case KernelFamily::squared_exponential:
      return -std::exp(-0.5 * r * r);
  }
  return 0.0;
}

}  // namespace

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "matern32") return KernelFamily::matern32;
  if (name == "matern52") return KernelFamily::matern52;
  if (name == "squared-exponential" || name == "squared_exponential" || name == "se")
    return KernelFamily::squared_exponential;
  throw std::invalid_argument("unknown kernel family: " + name);
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::matern32: return "matern32";
    case KernelFamily::matern52: return "matern52";
    case KernelFamily::squared_exponential: return "squared-exponential";
  }
  return "?";
}

double kernel_value(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double r = (x - y).norm() / spec.lengthscale;
  return spec.amplitude * spec.amplitude * correlation(spec.family, r);
}

Eigen::VectorXd kernel_grad_x(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double kappa2 = spec.lengthscale * spec.lengthscale;
  const double r = (x - y).norm() / spec.lengthscale;
  const double scale = spec.amplitude * spec.amplitude * radial_slope(spec.family, r) / kappa2;
  return scale * (x - y);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      out(i, j) = kernel_value(spec, a.row(i).transpose(), b.row(j).transpose());
  return out;
}

Eigen::VectorXd sample_spectral_frequency(const KernelSpec& spec, int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd omega(dim);
  for (int i = 0; i < dim; ++i) omega[i] = normal(rng);
  switch (spec.family) {
    case KernelFamily::squared_exponential:
      return omega / spec.lengthscale;
    case KernelFamily::matern32:
    case KernelFamily::matern52: {
      // Multivariate-t with 2*nu degrees of freedom, scale 1/lengthscale:
      // omega = z * sqrt(2*nu / chi2_{2*nu}) / lengthscale.
      const double two_nu = spec.family == KernelFamily::matern32 ? 3.0 : 5.0;
      std::gamma_distribution<double> gamma(two_nu / 2.0, 2.0);
      const double chi2 = gamma(rng);
      return omega * std::sqrt(two_nu / chi2) / spec.lengthscale;
    }
  }
  return omega;
}

}  // namespace pbo
