#ifndef SPATH_COX_HPP
#define SPATH_COX_HPP

#include "spath/samplers.hpp"

namespace spath {

/// log B(theta): minus the Laplace-exponent integral of the weighted
/// transform plus the sum of theta . Z_i over the complete observations.
double log_b(std::span<const double> theta, const SurvivalDataset& data, const PriorSpec& prior);

struct CoxConfig {
  long cycles = 1000;  // retained
  long burn_in = 1000;
  std::uint64_t seed = 1;
  std::vector<double> grid;
  double prior_sd = 10.0;       // zero-mean Gaussian prior per component
  double initial_step = 0.5;    // random-walk proposal scale
  bool adapt_step = true;       // adapt toward 20-50% acceptance during burn-in only
  bool freeze_theta = false;    // skip the Metropolis step (tests)
  std::vector<double> theta0;   // defaults to zeros
  bool record_paths = false;
  int batch_count = 20;
};

struct CoxState {
  SPath path;
  LatentDraw latent;
  std::vector<double> theta;
};

struct CoxResult {
  HazardCurve baseline;  // posterior-mean decreasing baseline hazard
  std::vector<double> theta_mean;
  std::vector<double> theta_sd;
  std::vector<double> theta_q025;
  std::vector<double> theta_q975;
  double acceptance_rate = 0.0;
  std::vector<std::vector<double>> theta_trace;  // retained cycles
  std::vector<SPath> path_trace;                 // when record_paths
};

/// Driver for the three-step cycle. One cycle is:
///   1. a full accelerated-path transition cycle under g_{N,theta},
///   2. fresh latent (y, Q) pairs for the positive increments,
///   3. a Gaussian random-walk Metropolis move on theta; integral tables
///      are rebuilt on acceptance.
/// Separate RNG streams drive the path, latent and theta randomness, so
/// with theta frozen at zero the path stream reproduces the plain
/// accelerated-path chain exactly.
CoxResult run_cox_chain(const CoxConfig& config, const SurvivalDataset& data,
                        const PriorSpec& prior);

/// Unnormalized log density of theta given (S, y, Q):
/// log pi(theta) + log B(theta) - sum_j g_theta(y_j) Q_j.
double cox_theta_log_target(std::span<const double> theta, const LatentDraw& latent,
                            const SurvivalDataset& data, const PriorSpec& prior,
                            double prior_sd);

}  // namespace spath

#endif
