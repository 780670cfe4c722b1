#include "spath/survival_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spath/errors.hpp"

namespace spath {

SurvivalDataset SurvivalDataset::from_records(std::vector<SurvivalRecord> records, double tau) {
  if (records.empty()) throw DataError("dataset: no records");
  SurvivalDataset data = empty(tau);
  data.covariate_dim_ = int(records.front().covariates.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::string at = " (record " + std::to_string(i + 1) + ")";
    if (!std::isfinite(r.time) || r.time <= 0.0) throw DataError("nonpositive time" + at);
    if (r.time > tau) throw DataError("time exceeds tau" + at);
    if (int(r.covariates.size()) != data.covariate_dim_) {
      throw DataError("inconsistent covariate dimension" + at);
    }
    for (double z : r.covariates) {
      if (!std::isfinite(z)) throw DataError("non-finite covariate" + at);
    }
    if (r.status == Status::censored && r.time != tau) data.all_censoring_at_tau_ = false;
  }
  data.records_ = std::move(records);
  for (int i = 0; i < int(data.records_.size()); ++i) {
    if (data.records_[size_t(i)].status == Status::complete) data.complete_order_.push_back(i);
  }
  std::stable_sort(data.complete_order_.begin(), data.complete_order_.end(),
                   [&](int a, int b) {
                     return data.records_[size_t(a)].time < data.records_[size_t(b)].time;
                   });
  return data;
}

SurvivalDataset SurvivalDataset::empty(double tau) {
  if (!std::isfinite(tau) || tau <= 0.0) throw DataError("tau must be positive");
  SurvivalDataset data;
  data.tau_ = tau;
  return data;
}

namespace {

// Shared TTT builder over per-record at-risk weights. Breakpoint values are
// accumulated segment by segment; the tail value (for u >= tau) is then
// pinned to the canonical sum  sum_complete w*T + tau * sum_censored w
// (general censoring times replace the second term by sum w*c), which the
// accumulation matches up to rounding.
PiecewiseLinear build_ttt_impl(const SurvivalDataset& data, std::span<const double> weights) {
  const int N = data.total_count();
  if (N == 0) return PiecewiseLinear::zero();
  const double tau = data.tau();

  std::vector<int> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return data.records()[size_t(a)].time < data.records()[size_t(b)].time;
  });

  std::vector<double> bps{0.0};
  for (int idx : order) {
    const double t = data.records()[size_t(idx)].time;
    if (t != bps.back()) bps.push_back(t);
  }
  if (bps.back() != tau) bps.push_back(tau);

  // suffix at-risk weight just above each breakpoint
  std::vector<double> slopes(bps.size() - 1, 0.0);
  {
    double acc = 0.0;
    int pos = N - 1;
    for (int k = int(bps.size()) - 2; k >= 0; --k) {
      while (pos >= 0 && data.records()[size_t(order[size_t(pos)])].time >= bps[size_t(k) + 1]) {
        acc += weights[size_t(order[size_t(pos)])];
        --pos;
      }
      slopes[size_t(k)] = acc;
    }
  }

  std::vector<double> values(bps.size(), 0.0);
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    values[k + 1] = values[k] + slopes[k] * (bps[k + 1] - bps[k]);
  }

  double tail = 0.0;
  for (int j = 1; j <= data.complete_count(); ++j) {
    tail += weights[size_t(data.complete_record(j))] * data.complete_time(j);
  }
  if (data.all_censoring_at_tau()) {
    double censored_weight = 0.0;
    for (int idx : order) {
      const auto& r = data.records()[size_t(idx)];
      if (r.status == Status::censored) censored_weight += weights[size_t(idx)];
    }
    tail += tau * censored_weight;
  } else {
    for (int idx : order) {
      const auto& r = data.records()[size_t(idx)];
      if (r.status == Status::censored) tail += weights[size_t(idx)] * r.time;
    }
  }
  if (std::fabs(values.back() - tail) > 1e-9 * std::max(1.0, std::fabs(tail))) {
    throw NumericError("ttt: accumulated tail disagrees with closed form");
  }
  values.back() = tail;

  return PiecewiseLinear(std::move(bps), std::move(values), std::move(slopes));
}

}  // namespace

PiecewiseLinear build_ttt(const SurvivalDataset& data) {
  std::vector<double> unit(size_t(data.total_count()), 1.0);
  return build_ttt_impl(data, unit);
}

PiecewiseLinear build_weighted_ttt(const SurvivalDataset& data, std::span<const double> theta) {
  if (int(theta.size()) != data.covariate_dim()) {
    throw DataError("weighted ttt: theta dimension mismatch");
  }
  std::vector<double> weights(size_t(data.total_count()));
  for (int i = 0; i < data.total_count(); ++i) {
    const auto& z = data.records()[size_t(i)].covariates;
    double dot = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) dot += theta[k] * z[k];
    weights[size_t(i)] = std::exp(dot);
  }
  return build_ttt_impl(data, weights);
}

namespace {

void validate_pieces(std::span<const HazardPiece> pieces) {
  if (pieces.empty()) throw DataError("hazard pieces: empty");
  if (pieces.front().start != 0.0) throw DataError("hazard pieces: first must start at 0");
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (!(pieces[k].rate > 0.0)) throw DataError("hazard pieces: rates must be positive");
    if (k > 0 && !(pieces[k].start > pieces[k - 1].start)) {
      throw DataError("hazard pieces: starts must increase");
    }
  }
}

double cumulative_hazard(std::span<const HazardPiece> pieces, double t) {
  double h = 0.0;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const double hi = (k + 1 < pieces.size()) ? std::min(t, pieces[k + 1].start) : t;
    if (hi <= pieces[k].start) break;
    h += pieces[k].rate * (hi - pieces[k].start);
  }
  return h;
}

}  // namespace

double piecewise_exponential_survival(std::span<const HazardPiece> pieces, double t) {
  validate_pieces(pieces);
  if (t <= 0.0) return 1.0;
  return std::exp(-cumulative_hazard(pieces, t));
}

SurvivalDataset simulate_piecewise_exponential(std::span<const HazardPiece> pieces, int count,
                                               double tau, std::uint64_t seed) {
  validate_pieces(pieces);
  if (!(tau > 0.0)) throw DataError("tau must be positive");
  if (count < 0) throw DataError("negative sample count");
  if (count == 0) return SurvivalDataset::empty(tau);

  Rng rng = make_rng(seed);
  std::exponential_distribution<double> unit_exp(1.0);
  std::vector<SurvivalRecord> records;
  records.reserve(size_t(count));
  for (int i = 0; i < count; ++i) {
    const double e = unit_exp(rng);
    // invert the piecewise-linear cumulative hazard
    double t = 0.0;
    double consumed = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const double seg =
          (k + 1 < pieces.size())
              ? pieces[k].rate * (pieces[k + 1].start - pieces[k].start)
              : std::numeric_limits<double>::infinity();
      if (consumed + seg >= e) {
        t = pieces[k].start + (e - consumed) / pieces[k].rate;
        break;
      }
      consumed += seg;
    }
    if (t > tau) {
      records.push_back({tau, Status::censored, {}});
    } else {
      if (t <= 0.0) t = std::numeric_limits<double>::min();
      records.push_back({t, Status::complete, {}});
    }
  }
  return SurvivalDataset::from_records(std::move(records), tau);
}

}  // namespace spath
