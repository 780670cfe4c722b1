#include "spath/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "spath/errors.hpp"

namespace spath {

PosteriorModel::PosteriorModel(SurvivalDataset data, PriorSpec prior)
    : data_(std::move(data)), prior_(prior), g_(build_ttt(data_)) {
  prior_.validate();
  build_tables();
}

PosteriorModel::PosteriorModel(SurvivalDataset data, PriorSpec prior, PiecewiseLinear g)
    : data_(std::move(data)), prior_(prior), g_(std::move(g)) {
  prior_.validate();
  build_tables();
}

void PosteriorModel::build_tables() {
  const double upper = prior_.eta_upper;
  if (data_.total_count() > 0 && upper < data_.tau()) {
    throw std::invalid_argument("prior: eta_upper must be >= tau of the dataset");
  }

  grid_.clear();
  for (double v : g_.breakpoints()) {
    if (v < upper) grid_.push_back(v);
  }
  for (int j = 1; j <= n(); ++j) {
    const double t = data_.complete_time(j);
    if (t < upper) grid_.push_back(t);
  }
  grid_.push_back(upper);
  std::sort(grid_.begin(), grid_.end());
  grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());

  const std::size_t pieces = grid_.size() - 1;
  piece_base_.resize(pieces);
  piece_slope_.resize(pieces);
  piece_len_.resize(pieces);
  for (std::size_t k = 0; k < pieces; ++k) {
    const int seg = g_.segment_index(grid_[k]);
    const double slope =
        (seg >= 0 && grid_[k] < g_.last_breakpoint()) ? g_.slopes()[std::size_t(seg)] : 0.0;
    piece_base_[k] = prior_.beta_rate + g_(grid_[k]);
    piece_slope_[k] = slope;
    piece_len_[k] = grid_[k + 1] - grid_[k];
  }

  const int rows = n() + 1;
  xi_suffix_.assign(std::size_t(rows) * grid_.size(), kNegInf);
  const double log_eta_density = std::log(prior_.eta_mass / prior_.eta_upper);
  for (int i = 1; i <= rows; ++i) {
    const double p = double(i) - prior_.alpha;
    const double log_const =
        std::lgamma(p) - std::lgamma(1.0 - prior_.alpha) + log_eta_density;
    double* row = &xi_suffix_[std::size_t(i - 1) * grid_.size()];
    row[grid_.size() - 1] = kNegInf;
    for (int k = int(pieces) - 1; k >= 0; --k) {
      double piece;
      if (k == 0 && piece_base_[0] == 0.0 && p >= 1.0) {
        // stable law with g(0) = 0: xi_i(0) is genuinely infinite for
        // i >= 2; the entry is never consumed by the estimators
        piece = std::numeric_limits<double>::infinity();
      } else {
        piece = log_const + log_power_segment_integral(p, piece_base_[std::size_t(k)],
                                                       piece_slope_[std::size_t(k)],
                                                       piece_len_[std::size_t(k)]);
      }
      row[std::size_t(k)] = log_add_exp(piece, row[std::size_t(k) + 1]);
    }
  }

  time_grid_index_.resize(std::size_t(n()));
  for (int j = 1; j <= n(); ++j) {
    const double t = data_.complete_time(j);
    const auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
    if (it == grid_.end() || *it != t) {
      // complete time at or beyond eta_upper: xi(T_j) = 0, point at L
      if (t >= upper) {
        time_grid_index_[std::size_t(j - 1)] = int(grid_.size()) - 1;
        continue;
      }
      throw NumericError("posterior: T_j is not a grid breakpoint");
    }
    time_grid_index_[std::size_t(j - 1)] = int(it - grid_.begin());
  }

  log_fact_.resize(std::size_t(n()) + 2);
  log_fact_[0] = 0.0;
  for (std::size_t k = 1; k < log_fact_.size(); ++k) {
    log_fact_[k] = log_fact_[k - 1] + std::log(double(k));
  }
}

double PosteriorModel::log_xi(int i, double t) const {
  if (i < 1 || i > max_xi_order()) throw std::invalid_argument("log_xi: order out of range");
  if (t >= prior_.eta_upper) return kNegInf;
  if (t <= grid_.front()) return log_xi_at_grid(i, 0);
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const std::size_t k = std::size_t(it - grid_.begin()) - 1;
  const double suffix = xi_suffix_[std::size_t(i - 1) * grid_.size() + k + 1];
  const double p = double(i) - prior_.alpha;
  const double offset = t - grid_[k];
  const double base = piece_base_[k] + piece_slope_[k] * offset;
  const double log_const = std::lgamma(p) - std::lgamma(1.0 - prior_.alpha) +
                           std::log(prior_.eta_mass / prior_.eta_upper);
  const double partial =
      log_const + log_power_segment_integral(p, base, piece_slope_[k], piece_len_[k] - offset);
  return log_add_exp(partial, suffix);
}

double PosteriorModel::log_phi(const SPath& path) const {
  if (path.n() != n()) throw std::invalid_argument("log_phi: path length mismatch");
  double acc = 0.0;
  for (int j = 1; j <= n(); ++j) {
    acc += log_phi_term(j, path.coords[std::size_t(j) - 1], path.coords[std::size_t(j)]);
    if (acc == kNegInf) return kNegInf;
  }
  return acc;
}

double PosteriorModel::lambda_term(double t, int j, int m) const {
  if (m == 0) return 0.0;
  const double den = log_xi_at_time(m, j);
  if (den == kNegInf) return 0.0;
  const double num =
      (t <= complete_time(j)) ? log_xi_at_time(m + 1, j) : log_xi(m + 1, t);
  if (num == kNegInf) return 0.0;
  return std::exp(num - den);
}

double PosteriorModel::sum_lambda(double t, const SPath& path) const {
  double acc = 0.0;
  for (int j = 1; j <= n(); ++j) {
    const int m = path.increment(j);
    if (m > 0) acc += lambda_term(t, j, m);
  }
  return acc;
}

namespace {

// deterministic chunked parallel reduction over an enumeration
template <typename Item, typename Eval>
void weighted_lambda_reduction(const std::vector<Item>& items,
                               const std::vector<double>& log_w, double log_w_max,
                               std::span<const double> grid, const Eval& eval,
                               std::vector<double>& acc, double& total_weight) {
  constexpr int kChunks = 16;
  const std::size_t count = items.size();
  std::vector<std::vector<double>> chunk_acc(kChunks, std::vector<double>(grid.size(), 0.0));
  std::vector<double> chunk_weight(kChunks, 0.0);
  const unsigned workers = std::min(std::max(1u, std::thread::hardware_concurrency()),
                                    unsigned(kChunks));
  std::vector<std::thread> threads;
  std::size_t lo = 0;
  const std::size_t step = (count + kChunks - 1) / kChunks;
  for (int c = 0; c < kChunks; ++c) {
    const std::size_t hi = std::min(count, lo + step);
    if (lo >= hi) break;
    auto work = [&, c, lo, hi] {
      for (std::size_t idx = lo; idx < hi; ++idx) {
        const double w = std::exp(log_w[idx] - log_w_max);
        if (w == 0.0) continue;
        chunk_weight[std::size_t(c)] += w;
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
          chunk_acc[std::size_t(c)][gi] += w * eval(items[idx], grid[gi]);
        }
      }
    };
    if (workers > 1) {
      threads.emplace_back(work);
      if (threads.size() == workers) {
        for (auto& th : threads) th.join();
        threads.clear();
      }
    } else {
      work();
    }
    lo = hi;
  }
  for (auto& th : threads) th.join();
  total_weight = 0.0;
  acc.assign(grid.size(), 0.0);
  for (int c = 0; c < kChunks; ++c) {
    total_weight += chunk_weight[std::size_t(c)];
    for (std::size_t gi = 0; gi < grid.size(); ++gi) acc[gi] += chunk_acc[std::size_t(c)][gi];
  }
}

}  // namespace

std::vector<double> estimate_hazard_exact(std::span<const double> grid,
                                          const PosteriorModel& model, int cap) {
  const int n = model.n();
  std::vector<double> out(grid.size(), 0.0);
  if (n == 0) {
    for (std::size_t gi = 0; gi < grid.size(); ++gi) out[gi] = model.prior_term(grid[gi]);
    return out;
  }
  if (n > cap) {
    throw NumericError("estimate_hazard_exact: n = " + std::to_string(n) +
                       " exceeds the enumeration cap " + std::to_string(cap));
  }
  const auto paths = enumerate_paths(n, cap);
  std::vector<double> log_w(paths.size());
  double log_w_max = kNegInf;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    log_w[i] = model.log_phi(paths[i]);
    log_w_max = std::max(log_w_max, log_w[i]);
  }
  if (log_w_max == kNegInf) throw NumericError("estimate_hazard_exact: all path weights vanish");

  std::vector<double> acc;
  double total = 0.0;
  weighted_lambda_reduction(
      paths, log_w, log_w_max, grid,
      [&](const SPath& s, double t) { return model.sum_lambda(t, s); }, acc, total);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    out[gi] = model.prior_term(grid[gi]) + acc[gi] / total;
  }
  return out;
}

double estimate_hazard_exact(double t, const PosteriorModel& model, int cap) {
  return estimate_hazard_exact(std::span<const double>(&t, 1), model, cap)[0];
}

double log_partition_weight(const Partition& p, const PosteriorModel& model) {
  double acc = 0.0;
  for (const auto& cell : p.cells) {
    acc += model.log_xi_at_time(int(cell.size()), cell.back());
    if (acc == kNegInf) return kNegInf;
  }
  return acc;
}

std::vector<double> estimate_hazard_partition_exact(std::span<const double> grid,
                                                    const PosteriorModel& model, int cap) {
  const int n = model.n();
  std::vector<double> out(grid.size(), 0.0);
  if (n == 0) {
    for (std::size_t gi = 0; gi < grid.size(); ++gi) out[gi] = model.prior_term(grid[gi]);
    return out;
  }
  if (n > cap) {
    throw NumericError("estimate_hazard_partition_exact: n = " + std::to_string(n) +
                       " exceeds the enumeration cap " + std::to_string(cap));
  }
  const auto partitions = enumerate_partitions(n, cap);
  std::vector<double> log_w(partitions.size());
  double log_w_max = kNegInf;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    log_w[i] = log_partition_weight(partitions[i], model);
    log_w_max = std::max(log_w_max, log_w[i]);
  }
  if (log_w_max == kNegInf) {
    throw NumericError("estimate_hazard_partition_exact: all partition weights vanish");
  }

  std::vector<double> acc;
  double total = 0.0;
  weighted_lambda_reduction(
      partitions, log_w, log_w_max, grid,
      [&](const Partition& p, double t) {
        double s = 0.0;
        for (const auto& cell : p.cells) {
          s += model.lambda_term(t, cell.back(), int(cell.size()));
        }
        return s;
      },
      acc, total);
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    out[gi] = model.prior_term(grid[gi]) + acc[gi] / total;
  }
  return out;
}

double estimate_hazard_partition_exact(double t, const PosteriorModel& model, int cap) {
  return estimate_hazard_partition_exact(std::span<const double>(&t, 1), model, cap)[0];
}

double draw_y(const SPath& path, int j, const PosteriorModel& model, Rng& rng) {
  const int m = path.increment(j);
  if (m <= 0) throw std::invalid_argument("draw_y: m_j must be positive");
  const double t0 = model.complete_time(j);
  const double upper = model.prior().eta_upper;
  if (t0 >= upper) throw NumericError("draw_y: degenerate support, T_j >= eta_upper");

  const double log_total = model.log_xi_at_time(m, j);
  if (log_total == kNegInf) throw NumericError("draw_y: vanishing conditional mass");
  const double u = uniform01(rng);
  if (u == 0.0) return upper;
  const double target = log_total + std::log(u);

  // locate the grid piece whose suffix brackets the target
  const auto grid = model.xi_grid();
  int lo_k = model.grid_index_of_time(j);
  int hi_k = int(grid.size()) - 1;
  while (hi_k - lo_k > 1) {
    const int mid = (lo_k + hi_k) / 2;
    if (model.log_xi_at_grid(m, mid) >= target) {
      lo_k = mid;
    } else {
      hi_k = mid;
    }
  }

  double lo = std::max(grid[std::size_t(lo_k)], t0);
  double hi = grid[std::size_t(hi_k)];
  const double log_eta_density = std::log(model.prior().eta_mass / upper);
  // safeguarded Newton on f(y) = log xi_m(y) - target (f decreasing)
  double y = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fy = model.log_xi(m, y) - target;
    if (fy > 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    const double log_density = log_kappa(m, model.g()(y), model.prior()) + log_eta_density;
    const double step = fy * std::exp(model.log_xi(m, y) - log_density);
    double next = y + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - y) <= 1e-12 * std::max(1.0, std::fabs(y))) {
      y = next;
      break;
    }
    y = next;
  }
  return std::min(std::max(y, t0), upper);
}

double draw_q(const SPath& path, int j, double y_j, const PosteriorModel& model, Rng& rng) {
  const int m = path.increment(j);
  if (m <= 0) throw std::invalid_argument("draw_q: m_j must be positive");
  const double shape = double(m) - model.prior().alpha;
  const double rate = model.prior().beta_rate + model.g()(y_j);
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw NumericError("draw_q: invalid gamma parameters");
  }
  std::gamma_distribution<double> gamma(shape, 1.0 / rate);
  return gamma(rng);
}

LatentDraw draw_latents(const SPath& path, const PosteriorModel& model, Rng& rng) {
  LatentDraw draw;
  for (int j = 1; j <= path.n(); ++j) {
    if (path.increment(j) > 0) {
      const double y = draw_y(path, j, model, rng);
      const double q = draw_q(path, j, y, model, rng);
      draw.pairs.push_back({j, y, q});
    }
  }
  return draw;
}

namespace {

// Gamma(a, x) upper incomplete for a in (-1, 1), extended below 0 via
// Gamma(a, x) = (x^a e^{-x} - Gamma(a+1, x)) / (-a).
double upper_incomplete_gamma(double a, double x) {
  if (a > 0.0) return boost::math::tgamma(a, x);
  if (a == 0.0) return boost::math::expint(1, x);
  return (std::pow(x, a) * std::exp(-x) - boost::math::tgamma(a + 1.0, x)) / (-a);
}

}  // namespace

std::vector<CrmJump> draw_crm_truncated(const PosteriorModel& model, double eps, Rng& rng) {
  if (!(eps > 0.0)) throw std::invalid_argument("draw_crm_truncated: eps must be positive");
  const PriorSpec& prior = model.prior();
  const double alpha = prior.alpha;
  const double rate = prior.beta_rate;
  const double upper = prior.eta_upper;
  const double gamma_norm = std::tgamma(1.0 - alpha);

  // untilted tail mass of sizes above eps
  double tail_eps;
  if (rate == 0.0) {
    tail_eps = std::pow(eps, -alpha) / alpha;
  } else {
    tail_eps = std::pow(rate, alpha) * upper_incomplete_gamma(-alpha, rate * eps);
  }
  const double mean_count = prior.eta_mass * tail_eps / gamma_norm;
  if (!(std::isfinite(mean_count)) || mean_count < 0.0) {
    throw NumericError("draw_crm_truncated: invalid proposal intensity");
  }

  std::poisson_distribution<long> poisson(mean_count);
  const long proposals = poisson(rng);
  std::vector<CrmJump> jumps;
  for (long k = 0; k < proposals; ++k) {
    const double location = uniform01(rng) * upper;
    const double u = std::max(uniform01(rng), 1e-300);
    double size;
    if (rate == 0.0) {
      size = eps * std::pow(u, -1.0 / alpha);
    } else {
      // invert the tail: Gamma(-alpha, rate z) = u * Gamma(-alpha, rate eps)
      const double target = u * upper_incomplete_gamma(-alpha, rate * eps);
      double lo = eps;
      double hi = std::max(2.0 * eps, 2.0 / rate);
      while (upper_incomplete_gamma(-alpha, rate * hi) > target && hi < 1e300) hi *= 2.0;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (upper_incomplete_gamma(-alpha, rate * mid) > target) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi - lo <= 1e-13 * std::max(1.0, lo)) break;
      }
      size = 0.5 * (lo + hi);
    }
    // thin against the g-tilt
    if (uniform01(rng) <= std::exp(-model.g()(location) * size)) {
      jumps.push_back({location, size});
    }
  }
  return jumps;
}

}  // namespace spath
