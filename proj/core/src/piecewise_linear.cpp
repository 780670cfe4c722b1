#include "spath/piecewise_linear.hpp"

#include <algorithm>
#include <cmath>

#include "spath/errors.hpp"

namespace spath {

PiecewiseLinear::PiecewiseLinear(std::vector<double> breakpoints,
                                 std::vector<double> values,
                                 std::vector<double> slopes)
    : breakpoints_(std::move(breakpoints)),
      values_(std::move(values)),
      slopes_(std::move(slopes)) {
  if (breakpoints_.empty() || values_.size() != breakpoints_.size() ||
      slopes_.size() + 1 != breakpoints_.size()) {
    throw DataError("piecewise linear: inconsistent sizes");
  }
  if (breakpoints_.front() != 0.0) throw DataError("piecewise linear: first breakpoint must be 0");
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] < breakpoints_[k + 1])) {
      throw DataError("piecewise linear: breakpoints must increase strictly");
    }
  }
  for (std::size_t k = 0; k < slopes_.size(); ++k) {
    if (!(slopes_[k] >= 0.0)) throw DataError("piecewise linear: negative slope");
    if (k > 0 && slopes_[k] > slopes_[k - 1]) {
      throw DataError("piecewise linear: slopes must be nonincreasing (concavity)");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DataError("piecewise linear: non-finite value");
  }
  // continuity sanity: stored values vs slope-implied values
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
    const double implied =
        values_[k] + slopes_[k] * (breakpoints_[k + 1] - breakpoints_[k]);
    const double scale = std::max({1.0, std::fabs(values_[k + 1]), std::fabs(implied)});
    if (std::fabs(implied - values_[k + 1]) > 1e-9 * scale) {
      throw DataError("piecewise linear: values inconsistent with slopes");
    }
  }
}

PiecewiseLinear PiecewiseLinear::zero() { return PiecewiseLinear({0.0}, {0.0}, {}); }

int PiecewiseLinear::segment_index(double u) const {
  if (breakpoints_.size() == 1) return -1;
  if (u <= breakpoints_.front()) return 0;
  if (u >= breakpoints_.back()) return int(slopes_.size()) - 1;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), u);
  return int(it - breakpoints_.begin()) - 1;
}

double PiecewiseLinear::operator()(double u) const {
  if (u <= breakpoints_.front()) return values_.front();
  if (u >= breakpoints_.back()) return values_.back();
  const int k = segment_index(u);
  return values_[size_t(k)] + slopes_[size_t(k)] * (u - breakpoints_[size_t(k)]);
}

}  // namespace spath
