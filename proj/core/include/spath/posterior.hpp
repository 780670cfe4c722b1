#ifndef SPATH_POSTERIOR_HPP
#define SPATH_POSTERIOR_HPP

#include <span>
#include <vector>

#include "spath/combinatorics.hpp"
#include "spath/crm_prior.hpp"
#include "spath/numerics.hpp"
#include "spath/survival_data.hpp"

namespace spath {

/// One latent pair attached to a positive path increment: a location
/// y in (T_j, L] and a jump mass q.
struct LatentPair {
  int j = 0;
  double y = 0.0;
  double q = 0.0;
};

struct LatentDraw {
  std::vector<LatentPair> pairs;
};

/// A jump of the truncated completely random measure part.
struct CrmJump {
  double location = 0.0;
  double size = 0.0;
};

/// Dataset + prior + cached integral tables. Every posterior weight (the
/// path weights phi, the normalizing Z, the estimator terms lambda_j) is
/// served from here, in log space.
///
/// Immutable after construction; safe for concurrent reads.
class PosteriorModel {
 public:
  PosteriorModel(SurvivalDataset data, PriorSpec prior);
  PosteriorModel(SurvivalDataset data, PriorSpec prior, PiecewiseLinear g);

  const SurvivalDataset& data() const { return data_; }
  const PriorSpec& prior() const { return prior_; }
  const PiecewiseLinear& g() const { return g_; }
  int n() const { return data_.complete_count(); }
  double complete_time(int j) const { return data_.complete_time(j); }

  /// log xi_i(T_j) from the cached table; i in 1..n+1, j in 1..n.
  double log_xi_at_time(int i, int j) const {
    return xi_suffix_[std::size_t(i - 1) * grid_.size() + std::size_t(time_grid_index_[std::size_t(j - 1)])];
  }
  /// log xi_i(t) for arbitrary t; -inf for t >= eta_upper.
  double log_xi(int i, double t) const;

  double log_choose_cached(int a, int b) const {
    if (b < 0 || b > a) return kNegInf;
    return log_fact_[std::size_t(a)] - log_fact_[std::size_t(b)] - log_fact_[std::size_t(a - b)];
  }

  /// Contribution of location j to log phi when the path steps from
  /// s_prev to s_cur there; 0 for a flat step.
  double log_phi_term(int j, int s_prev, int s_cur) const {
    const int m = s_cur - s_prev;
    if (m == 0) return 0.0;
    return log_choose_cached(j - 1 - s_prev, j - s_cur) + log_xi_at_time(m, j);
  }

  double log_phi(const SPath& path) const;

  /// lambda for a block of size m with maximal time index j:
  /// xi_{m+1}(max(t, T_j)) / xi_m(T_j); 0 for m = 0 or t >= eta_upper.
  double lambda_term(double t, int j, int m) const;
  double lambda_j(double t, const SPath& path, int j) const {
    return lambda_term(t, j, path.increment(j));
  }
  double sum_lambda(double t, const SPath& path) const;

  /// Prior contribution xi_1(t) of the hazard estimate.
  double prior_term(double t) const { return std::exp(log_xi(1, t)); }

  // integration grid internals (used by the samplers and the draws)
  std::span<const double> xi_grid() const { return grid_; }
  double log_xi_at_grid(int i, int k) const {
    return xi_suffix_[std::size_t(i - 1) * grid_.size() + std::size_t(k)];
  }
  int grid_index_of_time(int j) const { return time_grid_index_[std::size_t(j - 1)]; }
  int max_xi_order() const { return n() + 1; }

 private:
  void build_tables();

  SurvivalDataset data_;
  PriorSpec prior_;
  PiecewiseLinear g_;
  std::vector<double> grid_;            // g breakpoints clipped to [0, L], plus L
  std::vector<double> piece_base_;      // beta_rate + g at piece start
  std::vector<double> piece_slope_;
  std::vector<double> piece_len_;
  std::vector<double> xi_suffix_;       // (n+1) x grid_.size(), log xi_i(v_k)
  std::vector<int> time_grid_index_;    // T_j -> grid index
  std::vector<double> log_fact_;        // 0..n+1
};

/// Rao-Blackwellized exact estimator: full path enumeration
/// (Catalan(n) terms). Throws when n exceeds `cap`.
double estimate_hazard_exact(double t, const PosteriorModel& model, int cap = 12);
std::vector<double> estimate_hazard_exact(std::span<const double> grid,
                                          const PosteriorModel& model, int cap = 12);

/// Partition-sum exact estimator (Bell(n) terms); the independent oracle
/// for the path-sum route.
double estimate_hazard_partition_exact(double t, const PosteriorModel& model, int cap = 9);
std::vector<double> estimate_hazard_partition_exact(std::span<const double> grid,
                                                    const PosteriorModel& model, int cap = 9);

/// log of the partition weight W(p): product over cells of
/// xi_{|C|}(T_{max C}).
double log_partition_weight(const Partition& p, const PosteriorModel& model);

/// Location draw y_j | S, T from the density prop. to
/// 1(T_j < y) kappa_{m_j}(g(y)) eta(dy), by piecewise inverse CDF.
double draw_y(const SPath& path, int j, const PosteriorModel& model, Rng& rng);

/// Mass draw Q_j | S, y_j, T: gamma with shape m_j - alpha and rate
/// beta_rate + g(y_j).
double draw_q(const SPath& path, int j, double y_j, const PosteriorModel& model, Rng& rng);

/// All latent pairs for the positive increments of `path`, in ascending j.
LatentDraw draw_latents(const SPath& path, const PosteriorModel& model, Rng& rng);

/// Jumps of size > eps of the posterior CRM part mu*_N: locations proposed
/// from eta, sizes from the untilted tail restricted to (eps, inf), thinned
/// by exp(-g(u) z). Used for credible bands; the estimator mean never
/// relies on it.
std::vector<CrmJump> draw_crm_truncated(const PosteriorModel& model, double eps, Rng& rng);

}  // namespace spath

#endif
