#include "spath/crm_prior.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spath/numerics.hpp"
#include "spath/quadrature.hpp"

namespace spath {

void PriorSpec::validate() const {
  if (!std::isfinite(alpha) || alpha >= 1.0) {
    throw std::invalid_argument("prior: alpha must be < 1");
  }
  if (!std::isfinite(beta_rate) || beta_rate < 0.0) {
    throw std::invalid_argument("prior: beta_rate must be >= 0");
  }
  if (beta_rate == 0.0 && alpha <= 0.0) {
    throw std::invalid_argument("prior: beta_rate = 0 (stable law) requires 0 < alpha < 1");
  }
  if (!std::isfinite(eta_mass) || eta_mass <= 0.0) {
    throw std::invalid_argument("prior: eta_mass must be positive");
  }
  if (!std::isfinite(eta_upper) || eta_upper <= 0.0) {
    throw std::invalid_argument("prior: eta_upper must be positive");
  }
}

double log_kappa(int i, double g_at_u, const PriorSpec& prior) {
  if (i < 1) throw std::invalid_argument("kappa: i must be >= 1");
  const double total_rate = prior.beta_rate + g_at_u;
  if (total_rate <= 0.0) {
    throw NumericError("kappa: beta_rate + g = 0, the moment integral diverges");
  }
  const double p = double(i) - prior.alpha;
  return std::lgamma(p) - std::lgamma(1.0 - prior.alpha) - p * std::log(total_rate);
}

double kappa(int i, double g_at_u, const PriorSpec& prior) {
  return std::exp(log_kappa(i, g_at_u, prior));
}

double log_power_segment_integral(double p, double k0, double slope, double len) {
  if (len <= 0.0) return kNegInf;
  if (slope == 0.0) {
    if (k0 <= 0.0) throw NumericError("segment integral diverges: zero base on a flat piece");
    return std::log(len) - p * std::log(k0);
  }
  if (k0 == 0.0) {
    if (p >= 1.0) throw NumericError("segment integral diverges at the left endpoint");
    // (slope*len)^{1-p} / (slope (1-p))
    return (1.0 - p) * std::log(slope * len) - std::log(slope) - std::log1p(-p);
  }
  if (p == 1.0) {
    return std::log(std::log1p(slope * len / k0)) - std::log(slope);
  }
  const double delta_log = std::log1p(slope * len / k0);  // log(k1/k0)
  const double q = (1.0 - p) * delta_log;
  if (p > 1.0) {
    // (k0^{1-p} - k1^{1-p}) / (slope (p-1))
    return (1.0 - p) * std::log(k0) + std::log(-std::expm1(q)) - std::log(slope) -
           std::log(p - 1.0);
  }
  // (k1^{1-p} - k0^{1-p}) / (slope (1-p))
  return (1.0 - p) * std::log(k0) + std::log(std::expm1(q)) - std::log(slope) -
         std::log(1.0 - p);
}

namespace {

// iterate [t, L] as (k0, slope, len) sub-pieces of beta_rate + g
template <typename F>
void for_each_piece(double t, const PiecewiseLinear& g, const PriorSpec& prior, F&& fn) {
  const double upper = prior.eta_upper;
  if (t < 0.0) t = 0.0;
  if (t >= upper) return;
  const auto bps = g.breakpoints();
  const auto slopes = g.slopes();
  const auto values = g.values();
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    const double lo = std::max(t, bps[k]);
    const double hi = std::min(upper, bps[k + 1]);
    if (hi <= lo) continue;
    const double k0 = prior.beta_rate + values[k] + slopes[k] * (lo - bps[k]);
    fn(k0, slopes[k], hi - lo);
  }
  const double lo = std::max(t, bps.back());
  if (upper > lo) fn(prior.beta_rate + values.back(), 0.0, upper - lo);
}

}  // namespace

double log_xi_integral(int i, double t, const PiecewiseLinear& g, const PriorSpec& prior) {
  if (i < 1) throw std::invalid_argument("xi: i must be >= 1");
  const double p = double(i) - prior.alpha;
  const double log_const = std::lgamma(p) - std::lgamma(1.0 - prior.alpha) +
                           std::log(prior.eta_mass / prior.eta_upper);
  double acc = kNegInf;
  for_each_piece(t, g, prior, [&](double k0, double slope, double len) {
    acc = log_add_exp(acc, log_power_segment_integral(p, k0, slope, len));
  });
  return acc == kNegInf ? kNegInf : acc + log_const;
}

double xi_integral(int i, double t, const PiecewiseLinear& g, const PriorSpec& prior) {
  return std::exp(log_xi_integral(i, t, g, prior));
}

double crm_psi(double g_value, const PriorSpec& prior) {
  if (g_value < 0.0) throw std::invalid_argument("psi: negative argument");
  if (g_value == 0.0) return 0.0;
  const double alpha = prior.alpha;
  const double rate = prior.beta_rate;
  if (rate == 0.0) {
    if (alpha <= 0.0) throw NumericError("Laplace exponent diverges: beta_rate = 0, alpha <= 0");
    return std::pow(g_value, alpha) / alpha;
  }
  if (alpha == 0.0) return std::log1p(g_value / rate);
  // ((rate+g)^a - rate^a)/a = rate^a expm1(a log(1+g/rate)) / a
  return std::pow(rate, alpha) * std::expm1(alpha * std::log1p(g_value / rate)) / alpha;
}

double laplace_exponent_integral(const PiecewiseLinear& g, const PriorSpec& prior) {
  if (prior.beta_rate == 0.0 && prior.alpha <= 0.0) {
    throw NumericError("Laplace exponent diverges: beta_rate = 0, alpha <= 0");
  }
  const double upper = prior.eta_upper;
  const double weight = prior.eta_mass / upper;
  const auto bps = g.breakpoints();
  double total = 0.0;
  auto add_piece = [&](double lo, double hi) {
    if (hi <= lo) return;
    total += adaptive_simpson([&](double u) { return weight * crm_psi(g(u), prior); }, lo, hi,
                              1e-10 * (hi - lo) / upper + 1e-16);
  };
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    add_piece(std::max(0.0, bps[k]), std::min(upper, bps[k + 1]));
  }
  add_piece(bps.back(), upper);
  return total;
}

}  // namespace spath
