#pragma once

#include "lrdtest/sample.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace lrd {

/// Local-linear fit at every grid point: level and slope of beta(.).
struct LocalLinearFit {
  Eigen::MatrixXd level;  ///< n x p, beta_hat(t_i)
  Eigen::MatrixXd slope;  ///< n x p, beta_hat'(t_i)
  std::vector<std::string> warnings;
};

/// Kernel-weighted least squares of y_j on (x_j, x_j (t_j - t_i)) with
/// weights K((t_j - t_i)/b), for each t_i. Needs b > 0 and at least 2p
/// points with positive weight in every window. Throws NumericError if a
/// local design has condition number above 1e12.
LocalLinearFit local_linear(const RegressionSample& sample, double b);

/// Level only.
Eigen::MatrixXd local_linear_fit(const RegressionSample& sample, double b);

/// Jackknife-corrected coefficients 2 beta_hat_{b/sqrt2} - beta_hat_b and
/// the residuals y_i - x_i' beta_tilde(t_i).
struct CoefficientPath {
  Eigen::MatrixXd beta;
  Eigen::VectorXd residuals;
  double b = 0.0;
  std::vector<std::string> warnings;
};

CoefficientPath jackknife_fit(const RegressionSample& sample, double b);

enum class Smoother {
  jackknife,  ///< yhat = x' beta_tilde, the estimator used for residuals
  plain,      ///< yhat = x' beta_hat_b
};

/// Trace of the smoother matrix L (yhat = L y), from the per-point solves.
double smoother_trace(const RegressionSample& sample, double b,
                      Smoother kind = Smoother::jackknife);

/// GCV(b) = n^-1 |y - yhat|^2 / (1 - tr(L)/n)^2.
double gcv_score(const RegressionSample& sample, double b,
                 Smoother kind = Smoother::jackknife);

}  // namespace lrd
