#pragma once

#include "lrdtest/sample.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lrd {

/// Difference-based estimators. All grids are evaluated at t_i = i/n for
/// i = m..n-m and extended flat to the boundary rows. Kernel weights are
///   omega(t, j) = K((t_j - t)/tau) / sum_{i=1}^{n} K((t_i - t)/tau),
/// summed over j = m..n-m.
/// Preconditions: 2 <= m <= (n-1)/2 and 0 < tau < 1/2 (ConfigError).

/// sigma_H^2(t) from a scalar series.
Eigen::VectorXd sigmaH_diff(std::span<const double> series, std::size_t m,
                            double tau);

/// Sigma_acute(t) from the differences of x_i y_i.
MatrixGrid sigma_acute(const RegressionSample& sample, std::size_t m, double tau);

/// Difference-based coefficients Omega^-1(t) varpi(t), n x p. Throws
/// ConfigError for p = 1 (intercept differences vanish) and NumericError if
/// Omega(t) is singular.
Eigen::MatrixXd breve_beta(const RegressionSample& sample, std::size_t m, double tau);

/// Bias-corrected Sigma_acute - Sigma_breve, symmetrised. For p = 1, or when
/// varpi vanishes identically, this is Sigma_acute (the latter with a warning).
MatrixGrid sigma_hat(const RegressionSample& sample, std::size_t m, double tau,
                     std::vector<std::string>* warnings = nullptr);

/// M_hat(t) = (n eta)^-1 sum_i x_i x_i' K*((t_i - t*)/eta),
/// t* = max(eta, min(t, 1 - eta)).
Eigen::MatrixXd m_hat(const Eigen::MatrixXd& X, double t, double eta);

/// M_hat at every t_i. Appends a warning when n eta^2 < 4.
MatrixGrid m_hat_grid(const Eigen::MatrixXd& X, double eta,
                      std::vector<std::string>* warnings = nullptr);

struct PsdRoot {
  Eigen::MatrixXd root;
  double clipped_mass = 0.0;  ///< sum of |negative eigenvalues| set to zero
};

/// Symmetric root Q max(D, 0)^{1/2} Q'.
PsdRoot psd_sqrt(const Eigen::MatrixXd& A);

struct LrvEstimates {
  Eigen::VectorXd sigmaH;  ///< sigma_H(t_i), the square root of sigmaH2
  Eigen::VectorXd sigmaH2;
  MatrixGrid M_hat;        ///< empty for the trend model
  MatrixGrid Sigma_hat;
  MatrixGrid Sigma_root;
  std::size_t m = 0;
  double tau = 0.0;
  double eta = 0.0;
  double clipped_mass = 0.0;
  std::size_t clipped_points = 0;
  std::vector<std::string> warnings;
};

/// Trend model: sigma_H^2 from the differences of y; Sigma_hat = sigma_H^2.
LrvEstimates estimate_trend_lrv(const RegressionSample& sample, std::size_t m,
                                double tau);

/// Covariate model: M_hat, Sigma_hat and its root; sigma_H(t) is the root of
/// the intercept entry of Sigma_hat, floored at 1e-12.
LrvEstimates estimate_covariate_lrv(const RegressionSample& sample,
                                    std::size_t m, double tau, double eta);

}  // namespace lrd
