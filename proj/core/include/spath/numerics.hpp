#ifndef SPATH_NUMERICS_HPP
#define SPATH_NUMERICS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "spath/errors.hpp"

namespace spath {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b), safe for -inf arguments.
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

/// log(e^a - e^b) for a >= b; returns -inf when a == b.
inline double log_sub_exp(double a, double b) {
  if (b == kNegInf) return a;
  if (!(a >= b)) throw NumericError("log_sub_exp: a < b");
  if (a == b) return kNegInf;
  return a + std::log(-std::expm1(b - a));
}

/// log sum_k e^{x_k} with max subtraction; -inf for an all-(-inf) input.
inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = x > m ? x : m;
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

/// log n!  (lgamma-based; exact enough for weight arithmetic)
inline double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

/// log binom(a, b); -inf outside the triangle.
inline double log_choose(int a, int b) {
  if (b < 0 || b > a) return kNegInf;
  if (b == 0 || b == a) return 0.0;
  return log_factorial(a) - log_factorial(b) - log_factorial(a - b);
}

using Rng = std::mt19937_64;

/// Deterministic RNG construction; `stream` separates independent
/// sub-streams derived from the same user seed.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32),
                    std::uint32_t(stream), std::uint32_t(stream >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Draw an index proportional to exp(log_w[k]). Throws if every weight
/// is zero.
inline int sample_from_log_weights(std::span<const double> log_w, Rng& rng) {
  double m = kNegInf;
  for (double w : log_w) m = w > m ? w : m;
  if (m == kNegInf) throw NumericError("sample_from_log_weights: all weights vanish");
  double total = 0.0;
  std::vector<double> cumulative(log_w.size());
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    total += std::exp(log_w[k] - m);
    cumulative[k] = total;
  }
  const double u = uniform01(rng) * total;
  for (std::size_t k = 0; k + 1 < cumulative.size(); ++k) {
    if (u <= cumulative[k]) return int(k);
  }
  return int(log_w.size()) - 1;
}

}  // namespace spath

#endif
