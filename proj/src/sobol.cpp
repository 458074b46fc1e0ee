#include "pbo/sobol.hpp"

#include <array>
#include <bit>
#include <random>

#include "pbo/sobol_table.hpp"

namespace pbo {

DomainBox DomainBox::cube(int dim, double lo, double hi) {
  DomainBox box;
  box.lower = Eigen::VectorXd::Constant(dim, lo);
  box.upper = Eigen::VectorXd::Constant(dim, hi);
  box.validate();
  return box;
}

SobolSequence::SobolSequence(int dim, std::uint64_t scramble_seed) : dim_(dim) {
  if (dim < 1 || dim > detail::kSobolMaxDim)
    throw std::invalid_argument("SobolSequence: dimension out of supported range");

  directions_.resize(dim);
  for (int j = 0; j < dim; ++j) {
    std::array<std::uint32_t, 32> m{};
    if (j == 0) {
      m.fill(1);
    } else {
      const std::uint32_t poly = detail::kSobolPoly[j];
      const int degree = 31 - std::countl_zero(poly);
      for (int k = 0; k < degree; ++k) m[k] = detail::kSobolVinit[j][k];
      for (int k = degree; k < 32; ++k) {
        std::uint32_t value = m[k - degree] ^ (m[k - degree] << degree);
        for (int i = 1; i < degree; ++i)
          if ((poly >> (degree - i)) & 1u) value ^= m[k - i] << i;
        m[k] = value;
      }
    }
    for (int k = 0; k < 32; ++k) directions_[j][k] = m[k] << (31 - k);
  }

  state_.assign(dim, 0);
  shift_.assign(dim, 0);
  if (scramble_seed != 0) {
    std::mt19937_64 rng(scramble_seed);
    for (int j = 0; j < dim; ++j) shift_[j] = static_cast<std::uint32_t>(rng());
  }
}

Eigen::VectorXd SobolSequence::next() {
  if (count_ > 0) {
    const unsigned k = std::countr_zero(count_);  // gray-code flip bit
    for (int j = 0; j < dim_; ++j) state_[j] ^= directions_[j][k];
  }
  ++count_;
  Eigen::VectorXd point(dim_);
  for (int j = 0; j < dim_; ++j)
    point[j] = (state_[j] ^ shift_[j]) * 0x1p-32;
  return point;
}

Eigen::MatrixXd SobolSequence::take(int n) {
  Eigen::MatrixXd points(n, dim_);
  for (int i = 0; i < n; ++i) points.row(i) = next().transpose();
  return points;
}

Eigen::MatrixXd sobol_candidates(const DomainBox& domain, int n, std::uint64_t seed) {
  domain.validate();
  if (n < 1) throw std::invalid_argument("sobol_candidates: n must be >= 1");
  SobolSequence seq(domain.dim(), seed == 0 ? 0x9e3779b97f4a7c15ULL : seed);
  Eigen::MatrixXd unit = seq.take(n);
  Eigen::MatrixXd out(n, domain.dim());
  for (int i = 0; i < n; ++i) out.row(i) = domain.from_unit(unit.row(i).transpose()).transpose();
  return out;
}

}  // namespace pbo
