#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pbo/acquisition.hpp"
#include "pbo/gp.hpp"
#include "pbo/optimize.hpp"
#include "pbo/sobol.hpp"

using namespace pbo;

namespace {

// Crude star-discrepancy estimate: worst absolute gap between box volume
// and empirical fraction over random anchor boxes [0, a).
double discrepancy_estimate(const Eigen::MatrixXd& points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 4096; ++trial) {
    Eigen::VectorXd anchor(points.cols());
    double volume = 1.0;
    for (int j = 0; j < points.cols(); ++j) {
      anchor[j] = unit(rng);
      volume *= anchor[j];
    }
    int inside = 0;
    for (int i = 0; i < points.rows(); ++i) {
      bool in = true;
      for (int j = 0; j < points.cols(); ++j)
        if (points(i, j) >= anchor[j]) {
          in = false;
          break;
        }
      inside += in;
    }
    worst = std::max(worst, std::abs(volume - static_cast<double>(inside) / points.rows()));
  }
  return worst;
}

}  // namespace

TEST_CASE("sobol sequence fundamentals") {
  SUBCASE("unscrambled points match the reference values") {
    // First 8 points of the d=8 Joe-Kuo sequence.
    const double expected[8][8] = {
        {0, 0, 0, 0, 0, 0, 0, 0},
        {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5},
        {0.75, 0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75},
        {0.25, 0.75, 0.75, 0.75, 0.25, 0.25, 0.75, 0.25},
        {0.375, 0.375, 0.625, 0.875, 0.375, 0.125, 0.375, 0.875},
        {0.875, 0.875, 0.125, 0.375, 0.875, 0.625, 0.875, 0.375},
        {0.625, 0.125, 0.875, 0.625, 0.625, 0.875, 0.125, 0.125},
        {0.125, 0.625, 0.375, 0.125, 0.125, 0.375, 0.625, 0.625}};
    SobolSequence seq(8, 0);
    const Eigen::MatrixXd points = seq.take(8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) CHECK(points(i, j) == expected[i][j]);
  }

  SUBCASE("candidates are deterministic per seed and stay in bounds") {
    const DomainBox domain = DomainBox::cube(3, -2.0, 5.0);
    const Eigen::MatrixXd a = sobol_candidates(domain, 64, 42);
    const Eigen::MatrixXd b = sobol_candidates(domain, 64, 42);
    const Eigen::MatrixXd c = sobol_candidates(domain, 64, 43);
    CHECK(a == b);
    CHECK(a != c);
    for (int i = 0; i < a.rows(); ++i) CHECK(domain.contains(a.row(i).transpose()));
  }

  SUBCASE("scrambled points beat uniform sampling on star discrepancy") {
    const DomainBox unit_square = DomainBox::cube(2, 0.0, 1.0);
    int sobol_wins = 0;
    const int trials = 11;
    for (int s = 0; s < trials; ++s) {
      const Eigen::MatrixXd sobol = sobol_candidates(unit_square, 1024, 100 + s);
      std::mt19937_64 rng(200 + s);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Eigen::MatrixXd uniform(1024, 2);
      for (int i = 0; i < 1024; ++i) {
        uniform(i, 0) = u(rng);
        uniform(i, 1) = u(rng);
      }
      if (discrepancy_estimate(sobol, 7) < discrepancy_estimate(uniform, 7)) ++sobol_wins;
    }
    CHECK(sobol_wins > trials / 2);  // median comparison
  }
}

TEST_CASE("restart selection") {
  std::mt19937_64 rng(1);

  SUBCASE("k equal to the candidate count returns everything") {
    Eigen::VectorXd values(4);
    values << 0.1, 0.5, -0.2, 0.4;
    auto chosen = select_restarts(values, 4, 1.0, rng);
    std::sort(chosen.begin(), chosen.end());
    CHECK(chosen == std::vector<int>{0, 1, 2, 3});
  }

  SUBCASE("the dominant candidate is always included") {
    Eigen::VectorXd values(50);
    values.setConstant(0.0);
    values[17] = 1e9;
    for (int trial = 0; trial < 100; ++trial) {
      const auto chosen = select_restarts(values, 3, 1.0, rng);
      CHECK(std::find(chosen.begin(), chosen.end(), 17) != chosen.end());
    }
  }

  SUBCASE("degenerate all-equal values fall back to uniform sampling") {
    Eigen::VectorXd values = Eigen::VectorXd::Constant(10, 3.3);
    std::vector<int> counts(10, 0);
    const int draws = 20000;
    for (int trial = 0; trial < draws; ++trial) {
      for (int idx : select_restarts(values, 2, 1.0, rng)) counts[idx]++;
    }
    // Slot 1 is uniform over the 9 non-top candidates; top-1 is index 0
    // every time by the maxCoeff tie rule.
    CHECK(counts[0] == draws);
    for (int i = 1; i < 10; ++i) {
      const double p = static_cast<double>(counts[i]) / draws;
      CHECK(std::abs(p - 1.0 / 9.0) < 4.0 * std::sqrt((1.0 / 9.0) * (8.0 / 9.0) / draws));
    }
  }

  SUBCASE("selection frequencies follow the Boltzmann weights") {
    Eigen::VectorXd values(3);
    values << 0.0, 1.0, 2.0;  // top = index 2, sampled slot over {0, 1}
    const double mean = values.mean();
    const double sd = std::sqrt((values.array() - mean).square().mean());
    const double w0 = std::exp((values[0] - mean) / sd);
    const double w1 = std::exp((values[1] - mean) / sd);
    const double p1 = w1 / (w0 + w1);

    int count1 = 0;
    const int draws = 10000;
    for (int trial = 0; trial < draws; ++trial) {
      const auto chosen = select_restarts(values, 2, 1.0, rng);
      REQUIRE(chosen[0] == 2);
      if (chosen[1] == 1) ++count1;
    }
    const double se = std::sqrt(p1 * (1.0 - p1) / draws);
    CHECK(std::abs(static_cast<double>(count1) / draws - p1) < 4.0 * se);
  }

  SUBCASE("k above the candidate count is rejected") {
    Eigen::VectorXd values(3);
    values << 1.0, 2.0, 3.0;
    CHECK_THROWS_AS(select_restarts(values, 4, 1.0, rng), std::invalid_argument);
  }
}

TEST_CASE("maximize") {
  SUBCASE("recovers the maximizer of a concave quadratic") {
    const DomainBox domain = DomainBox::cube(2, 0.0, 1.0);
    Eigen::VectorXd target(2);
    target << 0.637, 0.281;
    Acquisition acq;
    acq.value = [target](const Eigen::VectorXd& x) { return -(x - target).squaredNorm(); };
    acq.gradient = [target](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
      return -2.0 * (x - target);
    };
    const OptimizeReport report = maximize(acq, domain, 5);
    CHECK((report.best_point - target).norm() < 1e-6);
    CHECK(report.best_value >= report.sweep_best_value);
  }

  SUBCASE("boundary optima are found at the corner") {
    const DomainBox domain = DomainBox::cube(2, 0.0, 1.0);
    Eigen::VectorXd corner(2);
    corner << 1.0, 1.0;
    Acquisition acq;
    acq.value = [corner](const Eigen::VectorXd& x) { return -(x - corner).squaredNorm(); };
    acq.gradient = [corner](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
      return -2.0 * (x - corner);
    };
    const OptimizeReport report = maximize(acq, domain, 6);
    CHECK((report.best_point - corner).norm() < 1e-7);
  }

  SUBCASE("pbgi refinement dominates the candidate sweep") {
    KernelSpec kernel;
    kernel.lengthscale = 0.3;
    Dataset data;
    data.inputs.resize(5, 2);
    data.inputs << 0.1, 0.2, 0.8, 0.3, 0.4, 0.9, 0.6, 0.6, 0.2, 0.7;
    data.outputs.resize(5);
    data.outputs << 0.5, -0.3, 0.9, 0.1, -0.6;
    const GpPosterior post = fit_posterior(kernel, data);

    AcquisitionContext ctx;
    ctx.posterior = &post;
    ctx.incumbent = 0.9;
    ctx.cost = CostModel::uniform(1.0);
    ctx.lambda = 1e-4;
    ctx.dimension = 2;

    Acquisition acq;
    acq.value = [&ctx](const Eigen::VectorXd& x) { return pbgi(ctx, x); };
    acq.gradient = [&ctx](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
      try {
        return pbgi_grad(ctx, x);
      } catch (const GradientUndefined&) {
        return std::nullopt;
      }
    };
    const DomainBox domain = DomainBox::cube(2, 0.0, 1.0);
    const OptimizeReport report = maximize(acq, domain, 11);
    CHECK(report.best_value >= report.sweep_best_value);
    CHECK(report.sweep_size == 400);
    CHECK(domain.contains(report.best_point));

    // deterministic given (acq, domain, seed)
    const OptimizeReport again = maximize(acq, domain, 11);
    CHECK(again.best_point == report.best_point);
    CHECK(again.best_value == report.best_value);
  }

  SUBCASE("gradient failure everywhere falls back to the best raw candidate") {
    const DomainBox domain = DomainBox::cube(1, 0.0, 1.0);
    Acquisition acq;
    acq.value = [](const Eigen::VectorXd& x) { return -(x[0] - 0.4) * (x[0] - 0.4); };
    acq.gradient = [](const Eigen::VectorXd&) -> std::optional<Eigen::VectorXd> {
      return std::nullopt;
    };
    const OptimizeReport report = maximize(acq, domain, 3);
    CHECK(report.gradient_fallback);
    CHECK(report.best_value == report.sweep_best_value);
  }
}
