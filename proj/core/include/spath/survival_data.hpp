#ifndef SPATH_SURVIVAL_DATA_HPP
#define SPATH_SURVIVAL_DATA_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "spath/numerics.hpp"
#include "spath/piecewise_linear.hpp"

namespace spath {

enum class Status : std::uint8_t { censored = 0, complete = 1 };

struct SurvivalRecord {
  double time = 0.0;
  Status status = Status::complete;
  std::vector<double> covariates;
};

/// Right-censored survival data observed until termination time tau.
///
/// Records keep their input order; the complete observations additionally
/// carry a stable sorted index T_1 <= ... <= T_n (ties broken by input
/// position) which fixes the path-coordinate labeling used everywhere else.
class SurvivalDataset {
 public:
  static SurvivalDataset from_records(std::vector<SurvivalRecord> records, double tau);
  /// Dataset with no observations (N = 0); used for prior-only curves.
  static SurvivalDataset empty(double tau);

  int total_count() const { return int(records_.size()); }            // N
  int complete_count() const { return int(complete_order_.size()); }  // n
  int covariate_dim() const { return covariate_dim_; }                // d
  double tau() const { return tau_; }

  /// T_j for j = 1..n (sorted complete times).
  double complete_time(int j) const { return records_[size_t(complete_order_[size_t(j - 1)])].time; }
  /// Record index behind T_j.
  int complete_record(int j) const { return complete_order_[size_t(j - 1)]; }
  /// Covariates of the record behind T_j.
  std::span<const double> complete_covariates(int j) const {
    return records_[size_t(complete_order_[size_t(j - 1)])].covariates;
  }

  std::span<const SurvivalRecord> records() const { return records_; }

  bool all_censoring_at_tau() const { return all_censoring_at_tau_; }

 private:
  SurvivalDataset() = default;

  std::vector<SurvivalRecord> records_;
  std::vector<int> complete_order_;  // record indices sorted by time, stable
  double tau_ = 0.0;
  int covariate_dim_ = 0;
  bool all_censoring_at_tau_ = true;
};

/// Total-time-on-test transform g_N: the integral up to u of the at-risk
/// count, constant for u >= tau.
PiecewiseLinear build_ttt(const SurvivalDataset& data);

/// Covariate-weighted transform g_{N,theta}: at-risk counts weighted by
/// exp(theta . Z_i). With theta = 0 this equals build_ttt bit for bit.
PiecewiseLinear build_weighted_ttt(const SurvivalDataset& data, std::span<const double> theta);

/// One piece of a piecewise-constant hazard: `rate` applies from `start`
/// until the next piece (the last piece extends to infinity).
struct HazardPiece {
  double start = 0.0;
  double rate = 1.0;
};

/// N i.i.d. lifetimes from the piecewise-constant hazard via inverse-CDF
/// sampling; lifetimes exceeding tau are recorded as censored at tau.
SurvivalDataset simulate_piecewise_exponential(std::span<const HazardPiece> pieces, int count,
                                               double tau, std::uint64_t seed);

/// Survival function S(t) of the piecewise-constant hazard (test oracle
/// for the simulator).
double piecewise_exponential_survival(std::span<const HazardPiece> pieces, double t);

}  // namespace spath

#endif
