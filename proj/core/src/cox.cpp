#include "spath/cox.hpp"

#include <algorithm>
#include <cmath>

#include "spath/errors.hpp"

namespace spath {

double log_b(std::span<const double> theta, const SurvivalDataset& data, const PriorSpec& prior) {
  if (int(theta.size()) != data.covariate_dim()) {
    throw DataError("log_b: theta dimension mismatch");
  }
  const PiecewiseLinear g = build_weighted_ttt(data, theta);
  double covariate_sum = 0.0;
  for (int j = 1; j <= data.complete_count(); ++j) {
    const auto z = data.complete_covariates(j);
    for (std::size_t k = 0; k < theta.size(); ++k) covariate_sum += theta[k] * z[k];
  }
  return -laplace_exponent_integral(g, prior) + covariate_sum;
}

double cox_theta_log_target(std::span<const double> theta, const LatentDraw& latent,
                            const SurvivalDataset& data, const PriorSpec& prior,
                            double prior_sd) {
  double log_prior = 0.0;
  for (double v : theta) log_prior -= 0.5 * (v / prior_sd) * (v / prior_sd);
  const PiecewiseLinear g = build_weighted_ttt(data, theta);
  double covariate_sum = 0.0;
  for (int j = 1; j <= data.complete_count(); ++j) {
    const auto z = data.complete_covariates(j);
    for (std::size_t k = 0; k < theta.size(); ++k) covariate_sum += theta[k] * z[k];
  }
  double latent_term = 0.0;
  for (const auto& pair : latent.pairs) latent_term -= g(pair.y) * pair.q;
  return log_prior - laplace_exponent_integral(g, prior) + covariate_sum + latent_term;
}

namespace {

std::vector<double> quantiles(std::vector<double> values, double lo_q, double hi_q,
                              double* out_hi) {
  std::sort(values.begin(), values.end());
  auto pick = [&](double q) {
    const double pos = q * double(values.size() - 1);
    const std::size_t i = std::size_t(pos);
    const double frac = pos - double(i);
    if (i + 1 < values.size()) return values[i] * (1.0 - frac) + values[i + 1] * frac;
    return values.back();
  };
  *out_hi = pick(hi_q);
  return {pick(lo_q)};
}

}  // namespace

CoxResult run_cox_chain(const CoxConfig& config, const SurvivalDataset& data,
                        const PriorSpec& prior) {
  if (config.cycles < 1) throw std::invalid_argument("cox chain: cycles must be >= 1");
  const int d = data.covariate_dim();
  std::vector<double> theta = config.theta0;
  if (theta.empty()) theta.assign(std::size_t(d), 0.0);
  if (int(theta.size()) != d) throw DataError("cox chain: theta0 dimension mismatch");

  Rng path_rng = make_rng(config.seed, 1);
  Rng latent_rng = make_rng(config.seed, 2);
  Rng theta_rng = make_rng(config.seed, 3);

  PosteriorModel model(data, prior, build_weighted_ttt(data, theta));
  const int n = model.n();
  ChainState path_state{SPath{}, std::move(path_rng), 0};
  {
    std::vector<int> coords(std::size_t(n) + 1);
    for (int j = 0; j <= n; ++j) coords[std::size_t(j)] = j;
    path_state.path = validate_path(coords);
  }
  LatentDraw latent = draw_latents(path_state.path, model, latent_rng);
  double theta_log_target = (d > 0 && !config.freeze_theta)
                                ? cox_theta_log_target(theta, latent, data, prior, config.prior_sd)
                                : 0.0;

  CoxResult result;
  result.baseline.grid.assign(config.grid.begin(), config.grid.end());
  std::vector<double> total(config.grid.size(), 0.0);
  const int batches = std::max(1, int(std::min<long>(config.batch_count, config.cycles)));
  const long batch_size = std::max<long>(1, config.cycles / batches);
  std::vector<std::vector<double>> batch_sums(std::size_t(batches),
                                              std::vector<double>(config.grid.size(), 0.0));

  double step_scale = config.initial_step;
  long proposals = 0;
  long accepts = 0;
  long window_proposals = 0;
  long window_accepts = 0;
  std::normal_distribution<double> normal(0.0, 1.0);

  const long total_cycles = config.burn_in + config.cycles;
  for (long cycle = 0; cycle < total_cycles; ++cycle) {
    // step 1: path transition cycle under the current weighted transform
    for (int r = 1; r <= n - 1; ++r) ap_step(path_state, r, model);
    // step 2: latent locations and masses
    latent = draw_latents(path_state.path, model, latent_rng);
    // step 3: Metropolis move on theta
    if (d > 0 && !config.freeze_theta) {
      theta_log_target = cox_theta_log_target(theta, latent, data, prior, config.prior_sd);
      std::vector<double> proposal(theta);
      for (double& v : proposal) v += step_scale * normal(theta_rng);
      const double proposal_target =
          cox_theta_log_target(proposal, latent, data, prior, config.prior_sd);
      ++proposals;
      ++window_proposals;
      if (std::log(std::max(uniform01(theta_rng), 1e-300)) <
          proposal_target - theta_log_target) {
        theta = std::move(proposal);
        theta_log_target = proposal_target;
        model = PosteriorModel(data, prior, build_weighted_ttt(data, theta));
        ++accepts;
        ++window_accepts;
      }
      if (config.adapt_step && cycle < config.burn_in && window_proposals >= 50) {
        const double rate = double(window_accepts) / double(window_proposals);
        step_scale *= std::exp(rate - 0.3);
        step_scale = std::clamp(step_scale, 1e-4, 1e2);
        window_proposals = 0;
        window_accepts = 0;
      }
    }

    if (cycle < config.burn_in) continue;
    const long retained = cycle - config.burn_in;
    // baseline-hazard contribution of this cycle (prior term depends on theta)
    for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
      const double t = config.grid[gi];
      const double value = model.prior_term(t) + model.sum_lambda(t, path_state.path);
      total[gi] += value;
      const long b = retained / batch_size;
      if (b < batches) batch_sums[std::size_t(b)][gi] += value;
    }
    if (d > 0) result.theta_trace.push_back(theta);
    if (config.record_paths) result.path_trace.push_back(path_state.path);
  }

  result.baseline.estimate.resize(config.grid.size());
  result.baseline.mc_se.assign(config.grid.size(), 0.0);
  for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
    result.baseline.estimate[gi] = total[gi] / double(config.cycles);
    if (batches >= 2) {
      double mean = 0.0;
      for (int b = 0; b < batches; ++b) mean += batch_sums[std::size_t(b)][gi];
      mean /= double(batches) * double(batch_size);
      double var = 0.0;
      for (int b = 0; b < batches; ++b) {
        const double bm = batch_sums[std::size_t(b)][gi] / double(batch_size);
        var += (bm - mean) * (bm - mean);
      }
      result.baseline.mc_se[gi] = std::sqrt(var / double(batches - 1) / double(batches));
    }
  }

  result.acceptance_rate = proposals > 0 ? double(accepts) / double(proposals) : 0.0;
  if (d > 0) {
    result.theta_mean.assign(std::size_t(d), 0.0);
    result.theta_sd.assign(std::size_t(d), 0.0);
    result.theta_q025.assign(std::size_t(d), 0.0);
    result.theta_q975.assign(std::size_t(d), 0.0);
    for (int k = 0; k < d; ++k) {
      std::vector<double> comp;
      comp.reserve(result.theta_trace.size());
      for (const auto& row : result.theta_trace) comp.push_back(row[std::size_t(k)]);
      double mean = 0.0;
      for (double v : comp) mean += v;
      mean /= double(comp.size());
      double var = 0.0;
      for (double v : comp) var += (v - mean) * (v - mean);
      result.theta_mean[std::size_t(k)] = mean;
      result.theta_sd[std::size_t(k)] =
          comp.size() > 1 ? std::sqrt(var / double(comp.size() - 1)) : 0.0;
      double hi = 0.0;
      const auto lo = quantiles(comp, 0.025, 0.975, &hi);
      result.theta_q025[std::size_t(k)] = lo[0];
      result.theta_q975[std::size_t(k)] = hi;
    }
  }
  return result;
}

}  // namespace spath
