#ifndef SPATH_PIECEWISE_LINEAR_HPP
#define SPATH_PIECEWISE_LINEAR_HPP

#include <span>
#include <vector>

namespace spath {

/// Continuous, nondecreasing, concave piecewise-linear function on
/// [0, inf), constant beyond its last breakpoint. This is the shape of the
/// (weighted) total-time-on-test transform.
class PiecewiseLinear {
 public:
  /// Breakpoints must start at 0 and increase strictly; slopes (one per
  /// segment) must be nonnegative and nonincreasing. Values are the
  /// function values at the breakpoints and must be consistent with the
  /// slopes up to rounding.
  PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> values,
                  std::vector<double> slopes);

  /// Constant-zero function (single breakpoint at 0).
  static PiecewiseLinear zero();

  double operator()(double u) const;

  /// Index k of the segment [bp[k], bp[k+1]) containing u; clamps to the
  /// first/last segment outside the breakpoint range. Returns -1 when the
  /// function has a single breakpoint.
  int segment_index(double u) const;

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> slopes() const { return slopes_; }
  double value_at_0() const { return values_.front(); }
  double tail_value() const { return values_.back(); }
  double last_breakpoint() const { return breakpoints_.back(); }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

}  // namespace spath

#endif
