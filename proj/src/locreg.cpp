#include "lrdtest/locreg.hpp"

#include "lrdtest/error.hpp"
#include "lrdtest/kernel.hpp"

#include <cmath>
#include <sstream>

namespace lrd {
namespace {

struct PointwiseFit {
  Eigen::MatrixXd level;
  Eigen::MatrixXd slope;
  Eigen::VectorXd hat_diag;  // L_b(i, i)
  std::vector<std::string> warnings;
};

PointwiseFit fit_all(const RegressionSample& s, double b, bool want_hat) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw ConfigError("local_linear: bandwidth must be positive and finite");
  }
  const Eigen::Index n = s.y.size(), p = s.X.cols(), q = 2 * p;
  const double dn = static_cast<double>(n);
  // Slope columns use (t_j - t_i)/h; h = min(b, 1) keeps both blocks of the
  // local design on a comparable scale.
  const double h = std::min(b, 1.0);
  const Eigen::Index reach =
      std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(std::ceil(b * dn)));

  PointwiseFit out;
  out.level.resize(n, p);
  out.slope.resize(n, p);
  if (want_hat) out.hat_diag.resize(n);

  Eigen::MatrixXd S(q, q);
  Eigen::VectorXd r(q), z(q);
  for (Eigen::Index i = 0; i < n; ++i) {
    S.setZero();
    r.setZero();
    int support = 0;
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - reach);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + reach);
    for (Eigen::Index j = lo; j <= hi; ++j) {
      const double d = static_cast<double>(j - i) / dn;
      const double w = kernel::scaled(d, b);
      if (w <= 0.0) continue;
      ++support;
      const double u = d / h;
      z.head(p) = s.X.row(j).transpose();
      z.tail(p) = u * z.head(p);
      S.selfadjointView<Eigen::Lower>().rankUpdate(z, w);
      r.noalias() += (w * s.y(j)) * z;
    }
    if (support < q) {
      std::ostringstream os;
      os << "local_linear: fewer than " << q << " points in the window at t="
         << s.t(static_cast<std::size_t>(i)) << " (b=" << b << ")";
      throw ConfigError(os.str());
    }
    S.triangularView<Eigen::StrictlyUpper>() = S.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
      const double ridge = 1e-10 * S.trace();
      S.diagonal().array() += ridge;
      llt.compute(S);
      std::ostringstream os;
      os << "local_linear: ridge " << ridge << " added at t=" << s.t(static_cast<std::size_t>(i));
      out.warnings.push_back(os.str());
    }
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
      std::ostringstream os;
      os << "local_linear: singular local design at t=" << s.t(static_cast<std::size_t>(i))
         << " (b=" << b << ")";
      throw NumericError(os.str());
    }
    const Eigen::VectorXd eta = llt.solve(r);
    out.level.row(i) = eta.head(p).transpose();
    out.slope.row(i) = eta.tail(p).transpose() / h;
    if (want_hat) {
      // yhat_i = x_i' [S^-1 sum_j w_j z_j y_j]_{1:p}; the own-point weight is
      // K(0) with z_i = (x_i, 0).
      z.head(p) = s.X.row(i).transpose();
      z.tail(p).setZero();
      const Eigen::VectorXd g = llt.solve(z);
      out.hat_diag(i) = kernel::epanechnikov(0.0) * z.head(p).dot(g.head(p));
    }
  }
  return out;
}

Eigen::VectorXd fitted(const RegressionSample& s, const Eigen::MatrixXd& beta) {
  return (s.X.array() * beta.array()).rowwise().sum();
}

}  // namespace

LocalLinearFit local_linear(const RegressionSample& sample, double b) {
  auto f = fit_all(sample, b, false);
  return {std::move(f.level), std::move(f.slope), std::move(f.warnings)};
}

Eigen::MatrixXd local_linear_fit(const RegressionSample& sample, double b) {
  return fit_all(sample, b, false).level;
}

CoefficientPath jackknife_fit(const RegressionSample& sample, double b) {
  auto half = fit_all(sample, b / kernel::kSqrt2, false);
  auto full = fit_all(sample, b, false);
  CoefficientPath path;
  path.b = b;
  path.beta = 2.0 * half.level - full.level;
  path.residuals = sample.y - fitted(sample, path.beta);
  path.warnings = std::move(half.warnings);
  path.warnings.insert(path.warnings.end(), full.warnings.begin(), full.warnings.end());
  return path;
}

double smoother_trace(const RegressionSample& sample, double b, Smoother kind) {
  if (kind == Smoother::plain) return fit_all(sample, b, true).hat_diag.sum();
  const double half = fit_all(sample, b / kernel::kSqrt2, true).hat_diag.sum();
  const double full = fit_all(sample, b, true).hat_diag.sum();
  return 2.0 * half - full;
}

double gcv_score(const RegressionSample& sample, double b, Smoother kind) {
  const double n = static_cast<double>(sample.n());
  Eigen::MatrixXd beta;
  double trace = 0.0;
  if (kind == Smoother::plain) {
    auto f = fit_all(sample, b, true);
    beta = std::move(f.level);
    trace = f.hat_diag.sum();
  } else {
    auto half = fit_all(sample, b / kernel::kSqrt2, true);
    auto full = fit_all(sample, b, true);
    beta = 2.0 * half.level - full.level;
    trace = 2.0 * half.hat_diag.sum() - full.hat_diag.sum();
  }
  const double rss = (sample.y - fitted(sample, beta)).squaredNorm();
  const double denom = 1.0 - trace / n;
  return (rss / n) / (denom * denom);
}

}  // namespace lrd
