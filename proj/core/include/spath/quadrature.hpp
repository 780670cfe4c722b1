#ifndef SPATH_QUADRATURE_HPP
#define SPATH_QUADRATURE_HPP

#include <functional>

namespace spath {

/// Recursive adaptive Simpson integration on a finite interval.
/// Throws NumericError when the depth cap is hit before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 55);

/// Verification-grade quadrature, independent of the closed forms it is
/// used to check. Backed by double-exponential rules (tanh-sinh on finite
/// intervals, exp-sinh on (a, inf)); handles integrable endpoint
/// singularities. Pass an infinite upper bound for half-line integrals.
/// The declared tolerance is absolute-or-relative, whichever is looser;
/// a result whose error estimate misses it raises NumericError.
double quadrature_oracle(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-10);

}  // namespace spath

#endif
