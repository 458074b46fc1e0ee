#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <random>
#include <optional>
#include <vector>

#include "pbo/sobol.hpp"

namespace pbo {

/// Acquisition bundle for the inner-loop maximizer: a value function and an
/// optional gradient. The gradient callable returns nullopt at points where
/// it is undefined (e.g. sigma = 0); such points are excluded from
/// refinement and the raw candidate value is kept.
struct Acquisition {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<std::optional<Eigen::VectorXd>(const Eigen::VectorXd&)> gradient;
};

struct RestartTrajectory {
  Eigen::VectorXd start;
  Eigen::VectorXd end;
  double start_value = 0.0;
  double end_value = 0.0;
  int iterations = 0;
  bool gradient_failed = false;
};

struct OptimizeReport {
  Eigen::VectorXd best_point;
  double best_value = 0.0;
  std::vector<RestartTrajectory> restarts;
  int sweep_size = 0;
  double sweep_best_value = 0.0;
  bool gradient_fallback = false;  // all restarts failed; best raw candidate returned
};

struct MaximizeOptions {
  int sweep_points_per_dim = 200;
  int restarts_per_dim = 10;
  double temperature = 1.0;
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
};

/// Boltzmann restart selection: k distinct candidate indices sampled with
/// probability proportional to exp(temperature * standardized value), with
/// the top-1 candidate always included. Degenerate all-equal values fall
/// back to uniform sampling.
std::vector<int> select_restarts(const Eigen::VectorXd& acq_values, int k, double temperature,
                                 std::mt19937_64& rng);

/// Multi-start maximization over a box: Sobol candidate sweep, heuristic
/// restart selection, and projected gradient ascent with backtracking line
/// search from each restart. Deterministic given (acq, domain, seed); the
/// result never falls below the candidate-sweep maximum and never leaves
/// the domain.
OptimizeReport maximize(const Acquisition& acq, const DomainBox& domain, std::uint64_t seed,
                        const MaximizeOptions& options = {});

/// One projected-ascent refinement from a given start point.
RestartTrajectory refine_ascent(const Acquisition& acq, const DomainBox& domain,
                                const Eigen::VectorXd& start, const MaximizeOptions& options = {});

}  // namespace pbo
