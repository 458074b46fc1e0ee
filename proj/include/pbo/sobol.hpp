#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pbo {

/// Axis-aligned box domain with per-dimension bounds.
struct DomainBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static DomainBox cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lower.size()); }

  void validate() const {
    if (lower.size() != upper.size()) throw std::invalid_argument("DomainBox: bound size mismatch");
    for (Eigen::Index i = 0; i < lower.size(); ++i)
      if (!(lower[i] < upper[i])) throw std::invalid_argument("DomainBox: lower must be < upper");
  }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
    for (Eigen::Index i = 0; i < lower.size(); ++i)
      if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
    return true;
  }

  Eigen::VectorXd clip(Eigen::VectorXd x) const {
    for (Eigen::Index i = 0; i < lower.size(); ++i) x[i] = std::min(std::max(x[i], lower[i]), upper[i]);
    return x;
  }

  /// Affine map onto [0, 1]^d.
  Eigen::VectorXd to_unit(const Eigen::VectorXd& x) const {
    return (x - lower).cwiseQuotient(upper - lower);
  }
  Eigen::VectorXd from_unit(const Eigen::VectorXd& u) const {
    return lower + u.cwiseProduct(upper - lower);
  }
};

/// Sobol sequence (Joe-Kuo direction numbers, up to 40 dimensions) with an
/// optional seeded digital-shift scramble. Gray-code ordering; point 0 of
/// the unscrambled sequence is the origin.
class SobolSequence {
 public:
  /// scramble_seed = 0 disables scrambling (raw Sobol points).
  explicit SobolSequence(int dim, std::uint64_t scramble_seed = 0);

  /// Next point in [0, 1)^d.
  Eigen::VectorXd next();

  /// n points as rows of an n x d matrix.
  Eigen::MatrixXd take(int n);

 private:
  int dim_;
  std::uint64_t count_ = 0;
  std::vector<std::array<std::uint32_t, 32>> directions_;
  std::vector<std::uint32_t> state_;
  std::vector<std::uint32_t> shift_;
};

/// n scrambled low-discrepancy candidates mapped into the domain,
/// deterministic per seed.
Eigen::MatrixXd sobol_candidates(const DomainBox& domain, int n, std::uint64_t seed);

}  // namespace pbo
