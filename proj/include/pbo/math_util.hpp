#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pbo {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kSqrt2 = 1.4142135623730950488016887;

/// Standard normal density.
inline double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

/// Standard normal CDF via erfc, accurate in both tails.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

/// Expected improvement of a Gaussian with the given mean and standard
/// deviation over a comparator y: E max(0, N(mean, std) - y).
/// The std = 0 case degenerates to the exact linear tail max(0, mean - y).
inline double gaussian_ei(double mean, double std, double y) {
  if (std <= 0.0) return std::max(mean - y, 0.0);
  const double z = (mean - y) / std;
  return (mean - y) * normal_cdf(z) + std * normal_pdf(z);
}

/// sin(pi*x) with exact zeros at integer x.
inline double sin_pi(double x) {
  const double k = std::round(x);
  const double r = x - k;
  const double s = std::sin(M_PI * r);
  return (static_cast<long long>(k) % 2 == 0) ? s : -s;
}

/// SplitMix64 step; used to derive independent seeds from a master seed.
inline std::uint64_t split_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic seed for a named substream of a run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return split_mix(split_mix(seed ^ (0xd1b54a32d192ed03ULL * (stream + 1))) + index);
}

}  // namespace pbo
