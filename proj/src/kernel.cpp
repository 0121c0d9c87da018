#include "lrdtest/kernel.hpp"

#include "lrdtest/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <sstream>

namespace lrd::kernel {
namespace {

// Integrand of kappa2 before the Gamma(d+1)^-2 factor. For t > 1 the
// differences are formed with expm1/log1p; the naive form cancels badly
// once t^d is large.
double kappa2_integrand(double t, double d) {
  if (t <= 1.0) {
    const double a = std::pow(t, d);
    const double c = std::pow(t + 1.0, d);
    return a * (2.0 * a - c);
  }
  if (d == 0.0) return 0.0;
  const double td = std::pow(t, d);
  const double lower = std::expm1(d * std::log1p(-1.0 / t));  // (1-1/t)^d - 1
  const double upper = std::expm1(d * std::log1p(1.0 / t));   // (1+1/t)^d - 1
  return (-td * lower) * (-td * (lower + upper));
}

}  // namespace

double kappa2(double d, double abs_tol) {
  if (!(d >= 0.0 && d < 0.5)) {
    throw ConfigError("kappa2: d must lie in [0, 1/2)");
  }
  auto f = [d](double t) { return kappa2_integrand(t, d); };

  double total = 0.0;
  double err_total = 0.0;

  boost::math::quadrature::tanh_sinh<double> ts;
  for (auto [lo, hi] : {std::pair{0.0, 1.0}, std::pair{1.0, 2.0}}) {
    double err = 0.0;
    const double part = ts.integrate(f, lo, hi, 1e-13, &err);
    total += part;
    err_total += err * std::max(1.0, std::abs(part));  // relative estimate
  }

  constexpr double cutoff = 1e6;
  if (d > 0.0) {
    double lo = 2.0;
    while (lo < cutoff) {
      const double hi = std::min(2.0 * lo, cutoff);
      double err = 0.0;
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          f, lo, hi, 15, 1e-13, &err);
      err_total += err;
      lo = hi;
    }
    // int_C^inf d^2 (1-d) t^(2d-3) dt
    total += d * d * std::pow(cutoff, 2.0 * d - 2.0) / 2.0;
    // Next term of the asymptotic expansion bounds the tail error.
    err_total += d * std::pow(cutoff, 2.0 * d - 3.0);
  }

  if (!(err_total < abs_tol) || !std::isfinite(total)) {
    std::ostringstream os;
    os << "kappa2: quadrature did not converge (achieved " << err_total
       << ", requested " << abs_tol << ")";
    throw NumericError(os.str());
  }
  const double g = std::tgamma(d + 1.0);
  return total / (g * g);
}

}  // namespace lrd::kernel
