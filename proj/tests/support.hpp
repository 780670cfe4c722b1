#ifndef SPATH_TESTS_SUPPORT_HPP
#define SPATH_TESTS_SUPPORT_HPP

#include <vector>

#include "spath/combinatorics.hpp"
#include "spath/crm_prior.hpp"
#include "spath/survival_data.hpp"

namespace spath::testing {

/// Random dataset with `n_complete` complete times in (0, tau) and a few
/// censored records at tau.
inline SurvivalDataset random_dataset(int n_complete, double tau, Rng& rng, int censored = -1) {
  std::uniform_real_distribution<double> time(tau * 0.02, tau * 0.98);
  std::vector<SurvivalRecord> records;
  for (int i = 0; i < n_complete; ++i) {
    records.push_back({time(rng), Status::complete, {}});
  }
  if (censored < 0) censored = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < censored; ++i) {
    records.push_back({tau, Status::censored, {}});
  }
  return SurvivalDataset::from_records(std::move(records), tau);
}

/// Random prior from the implemented family; optionally allows the
/// stable-law corner (beta_rate = 0).
inline PriorSpec random_prior(double tau, Rng& rng, bool allow_stable = true) {
  PriorSpec prior;
  std::uniform_real_distribution<double> alpha_dist(-1.0, 0.9);
  std::uniform_real_distribution<double> rate_dist(0.1, 3.0);
  std::uniform_real_distribution<double> mass_dist(0.5, 2.0);
  std::uniform_real_distribution<double> upper_dist(1.0, 2.5);
  prior.alpha = alpha_dist(rng);
  prior.beta_rate = rate_dist(rng);
  if (allow_stable && uniform01(rng) < 0.2) {
    prior.beta_rate = 0.0;
    prior.alpha = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  }
  prior.eta_mass = mass_dist(rng);
  prior.eta_upper = tau * upper_dist(rng);
  prior.validate();
  return prior;
}

/// Uniformly-ish random valid path: a random partition mapped to its path.
inline SPath random_path(int n, Rng& rng) {
  std::vector<std::vector<int>> cells;
  for (int i = 1; i <= n; ++i) {
    const std::size_t pick =
        std::uniform_int_distribution<std::size_t>(0, cells.size())(rng);
    if (pick == cells.size()) {
      cells.push_back({i});
    } else {
      cells[pick].push_back(i);
    }
  }
  return path_of_partition(validate_partition(std::move(cells), n));
}

/// Proportional-hazards synthetic data: baseline piecewise-constant hazard
/// scaled by exp(theta * z) per subject, type-I censored at tau.
inline SurvivalDataset simulate_cox_data(int count, double tau, double theta, Rng& rng) {
  const double break_at = 1.0;
  const double rate0 = 1.0;
  const double rate1 = 0.5;
  std::vector<SurvivalRecord> records;
  std::normal_distribution<double> z_dist(0.0, 0.7);
  std::exponential_distribution<double> unit_exp(1.0);
  for (int i = 0; i < count; ++i) {
    const double z = z_dist(rng);
    const double scale = std::exp(theta * z);
    const double e = unit_exp(rng) / scale;
    double t;
    if (e <= rate0 * break_at) {
      t = e / rate0;
    } else {
      t = break_at + (e - rate0 * break_at) / rate1;
    }
    if (t > tau) {
      records.push_back({tau, Status::censored, {z}});
    } else {
      records.push_back({std::max(t, 1e-12), Status::complete, {z}});
    }
  }
  return SurvivalDataset::from_records(std::move(records), tau);
}

/// Random concave nondecreasing piecewise-linear function on [0, last].
inline PiecewiseLinear random_concave_pwl(double last, Rng& rng, int pieces = 4) {
  std::vector<double> bps{0.0};
  for (int k = 1; k < pieces; ++k) {
    bps.push_back(last * double(k) / double(pieces) *
                  (0.8 + 0.4 * uniform01(rng)));
  }
  bps.push_back(last);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  std::vector<double> slopes(bps.size() - 1);
  double slope = 2.0 + 3.0 * uniform01(rng);
  for (auto& s : slopes) {
    s = slope;
    slope *= 0.3 + 0.6 * uniform01(rng);
  }
  std::vector<double> values(bps.size(), uniform01(rng) < 0.5 ? 0.0 : 0.3 * uniform01(rng));
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    values[k + 1] = values[k] + slopes[k] * (bps[k + 1] - bps[k]);
  }
  return PiecewiseLinear(std::move(bps), std::move(values), std::move(slopes));
}

}  // namespace spath::testing

#endif
