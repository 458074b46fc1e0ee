#include "pbo/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pbo/math_util.hpp"

namespace pbo {

std::vector<int> select_restarts(const Eigen::VectorXd& acq_values, int k, double temperature,
                                 std::mt19937_64& rng) {
  const int n = static_cast<int>(acq_values.size());
  if (k > n) throw std::invalid_argument("select_restarts: k exceeds candidate count");
  if (k < 1) throw std::invalid_argument("select_restarts: k must be >= 1");

  int top = 0;
  acq_values.maxCoeff(&top);

  const double mean = acq_values.mean();
  const double sd = std::sqrt((acq_values.array() - mean).square().mean());

  std::vector<double> weight(n);
  if (sd > 0.0 && std::isfinite(sd)) {
    for (int i = 0; i < n; ++i) weight[i] = std::exp(temperature * (acq_values[i] - mean) / sd);
  } else {
    std::fill(weight.begin(), weight.end(), 1.0);
  }

  std::vector<int> chosen{top};
  weight[top] = 0.0;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  while (static_cast<int>(chosen.size()) < k) {
    double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    int pick = -1;
    if (total > 0.0) {
      double u = uniform(rng) * total;
      for (int i = 0; i < n; ++i) {
        u -= weight[i];
        if (u <= 0.0 && weight[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
    if (pick < 0) {  // numerical leftovers: first unchosen index
      for (int i = 0; i < n; ++i)
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
          pick = i;
          break;
        }
    }
    chosen.push_back(pick);
    weight[pick] = 0.0;
  }
  return chosen;
}

namespace {

// Gradient with active box constraints removed: pushing outward at a bound
// contributes nothing.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                   const DomainBox& domain) {
  Eigen::VectorXd out = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] <= domain.lower[i] && g[i] < 0.0) out[i] = 0.0;
    if (x[i] >= domain.upper[i] && g[i] > 0.0) out[i] = 0.0;
  }
  return out;
}

RestartTrajectory ascend(const Acquisition& acq, const DomainBox& domain, Eigen::VectorXd x,
                         const MaximizeOptions& options) {
  RestartTrajectory traj;
  traj.start = x;
  double fx = acq.value(x);
  traj.start_value = fx;

  const double domain_scale = (domain.upper - domain.lower).mean();
  double step = 0.0;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const auto maybe_grad = acq.gradient(x);
    if (!maybe_grad) {
      traj.gradient_failed = iter == 0;
      break;
    }
    const Eigen::VectorXd grad = projected_gradient(x, *maybe_grad, domain);
    const double gnorm = grad.norm();
    if (gnorm <= options.gradient_tolerance) break;
    if (step <= 0.0) step = 0.05 * domain_scale / gnorm;

    // Backtracking line search with a weak sufficient-increase condition;
    // the accepted step is grown for the next iteration.
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::VectorXd candidate = domain.clip(x + step * grad);
      const Eigen::VectorXd move = candidate - x;
      if (move.norm() == 0.0) break;
      const double fc = acq.value(candidate);
      if (fc >= fx + 1e-4 * grad.dot(move)) {
        x = candidate;
        fx = fc;
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  traj.end = x;
  traj.end_value = fx;
  traj.iterations = iter;
  return traj;
}

}  // namespace

RestartTrajectory refine_ascent(const Acquisition& acq, const DomainBox& domain,
                                const Eigen::VectorXd& start, const MaximizeOptions& options) {
  return ascend(acq, domain, domain.clip(start), options);
}

OptimizeReport maximize(const Acquisition& acq, const DomainBox& domain, std::uint64_t seed,
                        const MaximizeOptions& options) {
  domain.validate();
  const int d = domain.dim();
  const int sweep_n = std::max(1, options.sweep_points_per_dim * d);
  const int restarts = std::min(std::max(1, options.restarts_per_dim * d), sweep_n);

  const Eigen::MatrixXd candidates = sobol_candidates(domain, sweep_n, derive_seed(seed, 1));
  Eigen::VectorXd values(sweep_n);
  for (int i = 0; i < sweep_n; ++i) values[i] = acq.value(candidates.row(i).transpose());

  OptimizeReport report;
  report.sweep_size = sweep_n;
  int best_idx = 0;
  report.sweep_best_value = values.maxCoeff(&best_idx);
  report.best_point = candidates.row(best_idx).transpose();
  report.best_value = report.sweep_best_value;

  std::mt19937_64 rng(derive_seed(seed, 2));
  const std::vector<int> starts = select_restarts(values, restarts, options.temperature, rng);

  bool any_refined = false;
  for (int idx : starts) {
    RestartTrajectory traj = ascend(acq, domain, candidates.row(idx).transpose(), options);
    if (!traj.gradient_failed) any_refined = true;
    if (traj.end_value > report.best_value) {
      report.best_value = traj.end_value;
      report.best_point = traj.end;
    }
    report.restarts.push_back(std::move(traj));
  }
  report.gradient_fallback = !any_refined;
  return report;
}

}  // namespace pbo
