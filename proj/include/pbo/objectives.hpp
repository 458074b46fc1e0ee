#pragma once

#include <Eigen/Core>

#include "pbo/sobol.hpp"

namespace pbo {

/// Ackley function on [-1, 1]^d; global minimum 0 at the origin.
double ackley(const Eigen::VectorXd& x);

/// Levy function on [-10, 10]^d; global minimum 0 at (1, ..., 1).
double levy(const Eigen::VectorXd& x);

/// Rosenbrock function on [-5, 10]^d; global minimum 0 at (1, ..., 1).
double rosenbrock(const Eigen::VectorXd& x);

/// Heterogeneous evaluation cost c(x) = 20 ||S(x)||_1 + 1, where S is the
/// affine standardization of the domain onto [0, 1]^d. Ranges over
/// [1, 20 d + 1].
double linear_cost(const Eigen::VectorXd& x, const DomainBox& domain);
Eigen::VectorXd linear_cost_grad(const Eigen::VectorXd& x, const DomainBox& domain);

/// Gaussian bump profile base + height * exp(-x^2 / (2 width^2)) used for
/// both the non-stationary amplitude envelope and the bump-shaped cost of
/// the one-dimensional counterexample construction.
struct BumpProfile {
  double base = 0.1;
  double height = 10.0;
  double width = 1.0;

  double operator()(double x) const;
  double derivative(double x) const;
};

}  // namespace pbo
