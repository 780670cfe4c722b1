#include "spath/quadrature.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "spath/errors.hpp"

namespace spath {

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw NumericError("adaptive_simpson: depth cap reached");
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (a == b) return 0.0;
  if (!(a < b)) return -adaptive_simpson(f, b, a, tol, max_depth);
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double quadrature_oracle(const std::function<double(double)>& f, double a, double b, double tol) {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  try {
    if (std::isinf(b)) {
      boost::math::quadrature::exp_sinh<double> integrator;
      value = integrator.integrate([&](double x) { return f(a + x); }, tol, &error, &l1);
    } else {
      boost::math::quadrature::tanh_sinh<double> integrator;
      value = integrator.integrate(f, a, b, tol, &error, &l1);
    }
  } catch (const std::exception& e) {
    throw NumericError(std::string("quadrature_oracle: ") + e.what());
  }
  if (!std::isfinite(value)) throw NumericError("quadrature_oracle: non-finite result");
  if (error > 50.0 * tol * std::max(1.0, std::fabs(l1))) {
    throw NumericError("quadrature_oracle: did not reach the requested tolerance");
  }
  return value;
}

}  // namespace spath
