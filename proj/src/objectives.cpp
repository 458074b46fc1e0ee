#include "pbo/objectives.hpp"

#include <cmath>

#include "pbo/math_util.hpp"

namespace pbo {

double ackley(const Eigen::VectorXd& x) {
  const double d = static_cast<double>(x.size());
  const double mean_sq = x.squaredNorm() / d;
  double mean_cos = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) mean_cos += std::cos(2.0 * M_PI * x[i]);
  mean_cos /= d;
  return 20.0 - 20.0 * std::exp(-0.2 * std::sqrt(mean_sq)) - std::exp(mean_cos) + std::exp(1.0);
}

double levy(const Eigen::VectorXd& x) {
  const Eigen::Index d = x.size();
  auto w = [&](Eigen::Index i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  const double s1 = sin_pi(w(0)) * sin_pi(w(0));
  double total = s1;
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    const double s = std::sin(M_PI * wi + 1.0);
    total += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * s * s);
  }
  const double wd = w(d - 1);
  const double sd = std::sin(2.0 * M_PI * wd);
  total += (wd - 1.0) * (wd - 1.0) * (1.0 + sd * sd);
  return total;
}

double rosenbrock(const Eigen::VectorXd& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    total += 100.0 * a * a + b * b;
  }
  return total;
}

double linear_cost(const Eigen::VectorXd& x, const DomainBox& domain) {
  // S(x) lands in [0,1]^d, so the l1 norm is just the coordinate sum.
  return 20.0 * domain.to_unit(x).sum() + 1.0;
}

Eigen::VectorXd linear_cost_grad(const Eigen::VectorXd& x, const DomainBox& domain) {
  (void)x;
  return 20.0 * (domain.upper - domain.lower).cwiseInverse();
}

double BumpProfile::operator()(double x) const {
  const double z = x / width;
  return base + height * std::exp(-0.5 * z * z);
}

double BumpProfile::derivative(double x) const {
  const double z = x / width;
  return -height * std::exp(-0.5 * z * z) * x / (width * width);
}

}  // namespace pbo
