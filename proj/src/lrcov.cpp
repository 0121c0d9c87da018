#include "lrdtest/lrcov.hpp"

#include "lrdtest/error.hpp"
#include "lrdtest/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lrd {
namespace {

void check_window(std::size_t n, std::size_t m, double tau) {
  if (m < 2 || 2 * m > n - 1) {
    std::ostringstream os;
    os << "difference estimator: window m=" << m << " outside [2, (n-1)/2] for n=" << n;
    throw ConfigError(os.str());
  }
  if (!(tau > 0.0 && tau < 0.5)) {
    std::ostringstream os;
    os << "difference estimator: tau=" << tau << " outside (0, 1/2)";
    throw ConfigError(os.str());
  }
}

// Kernel smoothing of per-window quantities. Row j-1 of D holds the value for
// window j (1-based), meaningful for j = m..n-m. Returns n rows: the smoothed
// value at t_g for g = m..n-m, extended flat outside.
Eigen::MatrixXd smooth(const Eigen::MatrixXd& D, std::size_t m, double tau) {
  const auto n = static_cast<Eigen::Index>(D.rows());
  const double ntau = static_cast<double>(n) * tau;
  const auto reach = static_cast<Eigen::Index>(std::floor(ntau));
  std::vector<double> tap(static_cast<std::size_t>(reach) + 1);
  for (Eigen::Index k = 0; k <= reach; ++k) {
    tap[static_cast<std::size_t>(k)] = kernel::epanechnikov(static_cast<double>(k) / ntau);
  }
  const auto lo = static_cast<Eigen::Index>(m), hi = n - lo;  // 1-based window range
  Eigen::MatrixXd out(n, D.cols());
  for (Eigen::Index g = lo; g <= hi; ++g) {
    double norm = 0.0;
    for (Eigen::Index i = std::max<Eigen::Index>(1, g - reach);
         i <= std::min<Eigen::Index>(n, g + reach); ++i) {
      norm += tap[static_cast<std::size_t>(std::abs(i - g))];
    }
    if (!(norm > 0.0)) {
      std::ostringstream os;
      os << "difference estimator: empty kernel window at t=" << static_cast<double>(g) / n;
      throw NumericError(os.str());
    }
    auto row = out.row(g - 1);
    row.setZero();
    for (Eigen::Index j = std::max(lo, g - reach); j <= std::min(hi, g + reach); ++j) {
      row += tap[static_cast<std::size_t>(std::abs(j - g))] * D.row(j - 1);
    }
    row /= norm;
  }
  for (Eigen::Index g = 1; g < lo; ++g) out.row(g - 1) = out.row(lo - 1);
  for (Eigen::Index g = hi + 1; g <= n; ++g) out.row(g - 1) = out.row(hi - 1);
  return out;
}

// Row r of the result is the sum of rows 0..r-1 of A (row 0 is zero).
Eigen::MatrixXd prefix(const Eigen::MatrixXd& A) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(A.rows() + 1, A.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) P.row(i + 1) = P.row(i) + A.row(i);
  return P;
}

// Block difference over window j (1-based): sum_{j-m+1}^{j} - sum_{j+1}^{j+m},
// from a prefix table.
Eigen::RowVectorXd block_diff(const Eigen::MatrixXd& P, Eigen::Index j, Eigen::Index m) {
  return 2.0 * P.row(j) - P.row(j - m) - P.row(j + m);
}

MatrixGrid to_grid(const Eigen::MatrixXd& rows, Eigen::Index p, Eigen::Index q) {
  MatrixGrid g(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    g[static_cast<std::size_t>(i)] = Eigen::Map<const Eigen::MatrixXd>(rows.row(i).eval().data(), p, q);
  }
  return g;
}

// Outer products m L L' / 2 of the averaged block differences L/m of the
// rows of Z, laid out column-major per row.
Eigen::MatrixXd outer_windows(const Eigen::MatrixXd& Z, std::size_t m) {
  const Eigen::Index n = Z.rows(), p = Z.cols(), mm = static_cast<Eigen::Index>(m);
  const Eigen::MatrixXd P = prefix(Z);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, p * p);
  for (Eigen::Index j = mm; j <= n - mm; ++j) {
    const Eigen::VectorXd L = block_diff(P, j, mm).transpose();
    const Eigen::MatrixXd o = L * L.transpose() / (2.0 * static_cast<double>(m));
    D.row(j - 1) = Eigen::Map<const Eigen::RowVectorXd>(o.data(), p * p);
  }
  return D;
}

struct OmegaVarpi {
  Eigen::MatrixXd omega;  // n x p*p
  Eigen::MatrixXd varpi;  // n x p
};

OmegaVarpi omega_varpi(const RegressionSample& s, std::size_t m, double tau) {
  const Eigen::Index n = s.X.rows(), p = s.X.cols(), mm = static_cast<Eigen::Index>(m);
  // D_i = x_i x_i' - x_{i+m} x_{i+m}', i = 1..n-m; per-i D_i^2 and
  // D_i (x_i y_i - x_{i+m} y_{i+m}).
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n, p * p), cr = Eigen::MatrixXd::Zero(n, p);
  for (Eigen::Index i = 0; i + mm < n; ++i) {
    const Eigen::VectorXd a = s.X.row(i).transpose(), c = s.X.row(i + mm).transpose();
    const Eigen::MatrixXd Di = a * a.transpose() - c * c.transpose();
    const Eigen::MatrixXd D2 = Di * Di;
    sq.row(i) = Eigen::Map<const Eigen::RowVectorXd>(D2.data(), p * p);
    cr.row(i) = (Di * (a * s.y(i) - c * s.y(i + mm))).transpose();
  }
  const Eigen::MatrixXd Psq = prefix(sq), Pcr = prefix(cr);
  Eigen::MatrixXd Wsq = Eigen::MatrixXd::Zero(n, p * p), Wcr = Eigen::MatrixXd::Zero(n, p);
  const double inv = 1.0 / static_cast<double>(m);
  for (Eigen::Index j = mm; j <= n - mm; ++j) {
    // (1/m) sum_{i=j-m+1}^{j}, halved per the Omega/varpi definitions.
    Wsq.row(j - 1) = 0.5 * inv * (Psq.row(j) - Psq.row(j - mm));
    Wcr.row(j - 1) = 0.5 * inv * (Pcr.row(j) - Pcr.row(j - mm));
  }
  return {smooth(Wsq, m, tau), smooth(Wcr, m, tau)};
}

}  // namespace

Eigen::VectorXd sigmaH_diff(std::span<const double> series, std::size_t m, double tau) {
  const std::size_t n = series.size();
  check_window(n, m, tau);
  Eigen::MatrixXd Z(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) Z(static_cast<Eigen::Index>(i), 0) = series[i];
  return smooth(outer_windows(Z, m), m, tau).col(0);
}

MatrixGrid sigma_acute(const RegressionSample& sample, std::size_t m, double tau) {
  check_window(sample.n(), m, tau);
  const Eigen::MatrixXd Z = sample.X.array().colwise() * sample.y.array();
  const auto p = sample.X.cols();
  return to_grid(smooth(outer_windows(Z, m), m, tau), p, p);
}

namespace {

Eigen::MatrixXd solve_breve(const RegressionSample& sample, const OmegaVarpi& ov) {
  const Eigen::Index n = sample.X.rows(), p = sample.X.cols();
  Eigen::MatrixXd beta(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::MatrixXd Om = Eigen::Map<const Eigen::MatrixXd>(ov.omega.row(i).eval().data(), p, p);
    const Eigen::VectorXd w = ov.varpi.row(i).transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Om);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() >= 1e-12)) {
      std::ostringstream os;
      os << "breve_beta: Omega(t) singular at t=" << sample.t(static_cast<std::size_t>(i));
      throw NumericError(os.str());
    }
    beta.row(i) = ldlt.solve(w).transpose();
  }
  return beta;
}

}  // namespace

Eigen::MatrixXd breve_beta(const RegressionSample& sample, std::size_t m, double tau) {
  check_window(sample.n(), m, tau);
  if (sample.p() < 2) {
    throw ConfigError("breve_beta: needs p >= 2 (intercept-only differences vanish)");
  }
  return solve_breve(sample, omega_varpi(sample, m, tau));
}

MatrixGrid sigma_hat(const RegressionSample& sample, std::size_t m, double tau,
                     std::vector<std::string>* warnings) {
  MatrixGrid acute = sigma_acute(sample, m, tau);
  const Eigen::Index n = sample.X.rows(), p = sample.X.cols();
  if (p == 1) return acute;

  // A zero varpi means the data carry no signal to correct for.
  const auto ov = omega_varpi(sample, m, tau);
  if (ov.varpi.isZero(0.0)) {
    if (warnings) warnings->push_back("sigma_hat: varpi vanishes identically; no bias correction");
    return acute;
  }
  const Eigen::MatrixXd bb = solve_breve(sample, ov);
  Eigen::MatrixXd a(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.row(i) = (sample.X.row(i).transpose() *
                (sample.X.row(i).dot(bb.row(i)))).transpose();
  }
  const Eigen::MatrixXd breve = smooth(outer_windows(a, m), m, tau);
  MatrixGrid out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::MatrixXd corr =
        Eigen::Map<const Eigen::MatrixXd>(breve.row(i).eval().data(), p, p);
    const Eigen::MatrixXd d = acute[static_cast<std::size_t>(i)] - corr;
    out[static_cast<std::size_t>(i)] = 0.5 * (d + d.transpose());
  }
  return out;
}

Eigen::MatrixXd m_hat(const Eigen::MatrixXd& X, double t, double eta) {
  if (!(eta > 0.0 && eta < 0.5)) throw ConfigError("m_hat: eta outside (0, 1/2)");
  const Eigen::Index n = X.rows(), p = X.cols();
  const double dn = static_cast<double>(n);
  const double ts = std::max(eta, std::min(t, 1.0 - eta));
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p, p);
  const auto lo = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor((ts - eta) * dn)));
  const auto hi = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(std::ceil((ts + eta) * dn)));
  for (Eigen::Index i = lo; i <= hi; ++i) {
    const double w = kernel::scaled_jackknife(static_cast<double>(i) / dn - ts, eta);
    if (w == 0.0) continue;
    M.selfadjointView<Eigen::Lower>().rankUpdate(X.row(i - 1).transpose(), w);
  }
  M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
  return M / (dn * eta);
}

MatrixGrid m_hat_grid(const Eigen::MatrixXd& X, double eta, std::vector<std::string>* warnings) {
  const Eigen::Index n = X.rows();
  if (warnings && static_cast<double>(n) * eta * eta < 4.0) {
    std::ostringstream os;
    os << "m_hat: n eta^2 = " << static_cast<double>(n) * eta * eta << " < 4";
    warnings->push_back(os.str());
  }
  MatrixGrid out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = m_hat(X, static_cast<double>(i + 1) / static_cast<double>(n), eta);
  }
  return out;
}

PsdRoot psd_sqrt(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw NumericError("psd_sqrt: eigendecomposition failed");
  PsdRoot out;
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < 0.0) {
      out.clipped_mass += -ev(k);
      ev(k) = 0.0;
    }
  }
  const Eigen::MatrixXd& Q = es.eigenvectors();
  const Eigen::MatrixXd R = Q * ev.cwiseSqrt().asDiagonal() * Q.transpose();
  out.root = 0.5 * (R + R.transpose());
  return out;
}

LrvEstimates estimate_trend_lrv(const RegressionSample& sample, std::size_t m, double tau) {
  LrvEstimates out;
  out.m = m;
  out.tau = tau;
  out.sigmaH2 = sigmaH_diff(std::span<const double>(sample.y.data(), sample.n()), m, tau);
  out.sigmaH = out.sigmaH2.cwiseSqrt();
  const std::size_t n = sample.n();
  out.Sigma_hat.resize(n);
  out.Sigma_root.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.Sigma_hat[i] = Eigen::MatrixXd::Constant(1, 1, out.sigmaH2(static_cast<Eigen::Index>(i)));
    out.Sigma_root[i] = Eigen::MatrixXd::Constant(1, 1, out.sigmaH(static_cast<Eigen::Index>(i)));
  }
  return out;
}

LrvEstimates estimate_covariate_lrv(const RegressionSample& sample, std::size_t m,
                                    double tau, double eta) {
  LrvEstimates out;
  out.m = m;
  out.tau = tau;
  out.eta = eta;
  out.Sigma_hat = sigma_hat(sample, m, tau, &out.warnings);
  out.M_hat = m_hat_grid(sample.X, eta, &out.warnings);
  const std::size_t n = sample.n();
  out.Sigma_root.resize(n);
  out.sigmaH2.resize(static_cast<Eigen::Index>(n));
  out.sigmaH.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto r = psd_sqrt(out.Sigma_hat[i]);
    if (r.clipped_mass > 0.0) {
      out.clipped_mass += r.clipped_mass;
      ++out.clipped_points;
    }
    out.Sigma_root[i] = std::move(r.root);
    const double s11 = out.Sigma_hat[i](0, 0);
    const auto k = static_cast<Eigen::Index>(i);
    out.sigmaH2(k) = std::max(s11, 0.0);
    out.sigmaH(k) = std::max(std::sqrt(out.sigmaH2(k)), 1e-12);
  }
  if (out.clipped_points > 0) {
    std::ostringstream os;
    os << "sigma_hat: negative eigenvalues clipped at " << out.clipped_points
       << " grid points (total mass " << out.clipped_mass << ")";
    out.warnings.push_back(os.str());
  }
  return out;
}

}  // namespace lrd
