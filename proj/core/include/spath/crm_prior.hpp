#ifndef SPATH_CRM_PRIOR_HPP
#define SPATH_CRM_PRIOR_HPP

#include "spath/piecewise_linear.hpp"

namespace spath {

/// Completely-random-measure prior with Levy intensity
///   rho(dz|u) eta(du) = z^{-alpha-1} exp(-z * beta_rate) / Gamma(1-alpha) dz eta(du),
/// eta = eta_mass * Uniform[0, eta_upper].
///
/// alpha = 0 is the weighted gamma process with scale 1/beta_rate;
/// beta_rate = 0 with 0 < alpha < 1 is the stable law; alpha = 1/2 with
/// beta_rate > 0 is the inverse-Gaussian process.
struct PriorSpec {
  double alpha = 0.0;
  double beta_rate = 1.0;  // 1/beta; 0 encodes beta = infinity
  double eta_mass = 1.0;   // c
  double eta_upper = 6.0;  // L

  void validate() const;  // throws std::invalid_argument
};

/// kappa_i at a point: int z^i e^{-g z} rho(dz) =
/// Gamma(i-alpha)/Gamma(1-alpha) * (beta_rate + g)^{-(i-alpha)}.
/// Throws NumericError when beta_rate + g = 0 (the integral diverges).
double log_kappa(int i, double g_at_u, const PriorSpec& prior);
double kappa(int i, double g_at_u, const PriorSpec& prior);

/// log int_0^len (k0 + slope*s)^{-p} ds, the power-law segment integral
/// behind every xi evaluation. Throws NumericError on divergence
/// (k0 = 0 with p >= 1, or k0 = slope = 0).
double log_power_segment_integral(double p, double k0, double slope, double len);

/// xi_i(t) = int_t^L kappa_i(g(v)) (c/L) dv, piecewise closed form.
/// Zero (log: -inf) for t >= L.
double log_xi_integral(int i, double t, const PiecewiseLinear& g, const PriorSpec& prior);
double xi_integral(int i, double t, const PiecewiseLinear& g, const PriorSpec& prior);

/// Laplace exponent psi(g) = int (1 - e^{-gz}) rho(dz):
/// ((beta_rate+g)^alpha - beta_rate^alpha)/alpha, or log(1 + g/beta_rate)
/// at alpha = 0.
double crm_psi(double g_value, const PriorSpec& prior);

/// int_0^L psi(g(u)) (c/L) du by piecewise adaptive quadrature
/// (tolerance 1e-10). Throws NumericError when beta_rate = 0 and
/// alpha <= 0 (divergent exponent).
double laplace_exponent_integral(const PiecewiseLinear& g, const PriorSpec& prior);

}  // namespace spath

#endif
