#pragma once

#include <cmath>

namespace lrd::kernel {

inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Epanechnikov kernel 0.75 (1 - x^2) on [-1, 1].
inline double epanechnikov(double x) {
  return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
}

/// Equivalent kernel of the jackknife combination 2 fit(b/sqrt2) - fit(b),
/// in density form 2 sqrt2 K(sqrt2 x) - K(x). Integrates to one.
inline double jackknife(double x) {
  return 2.0 * kSqrt2 * epanechnikov(kSqrt2 * x) - epanechnikov(x);
}

/// K(u / b); callers apply the 1/(n b) normalisation.
inline double scaled(double u, double b) { return epanechnikov(u / b); }

/// K*(u / b), supported on |u| <= b.
inline double scaled_jackknife(double u, double b) { return jackknife(u / b); }

/// Long-memory constant
///   Gamma(d+1)^-2 * int_0^inf (t^d - (t-1)_+^d)(2 t^d - (t-1)_+^d - (t+1)^d) dt
/// by adaptive quadrature on [0, 1e6] plus the analytic tail of the
/// d^2 (1-d) t^(2d-3) asymptote. Requires 0 <= d < 1/2.
/// Throws NumericError if the requested absolute tolerance is not reached.
double kappa2(double d, double abs_tol = 1e-8);

}  // namespace lrd::kernel
