#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace lrd {

/// Observed regression data on the grid t_i = i/n, i = 1..n.
///
/// Row i of `X` holds the covariates at time (i+1)/n (0-based storage); the
/// first column is the intercept and is identically one.
struct RegressionSample {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;

  std::size_t n() const { return static_cast<std::size_t>(y.size()); }
  std::size_t p() const { return static_cast<std::size_t>(X.cols()); }

  /// Rescaled time of 0-based row `i`.
  double t(std::size_t i) const {
    return static_cast<double>(i + 1) / static_cast<double>(n());
  }

  /// Throws ConfigError unless shapes agree, column 0 is ones and all
  /// entries are finite.
  void validate() const;
};

/// Trend-model sample (p = 1): the design is the intercept column only.
RegressionSample make_trend_sample(const Eigen::VectorXd& y);

/// Prepends the intercept column to user covariates (n x q, q >= 0).
RegressionSample make_sample(const Eigen::VectorXd& y,
                             const Eigen::MatrixXd& covariates);

/// One p x p matrix per grid point.
using MatrixGrid = std::vector<Eigen::MatrixXd>;

}  // namespace lrd
