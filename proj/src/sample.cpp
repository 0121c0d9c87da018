#include "lrdtest/sample.hpp"

#include "lrdtest/error.hpp"

#include <sstream>

namespace lrd {

void RegressionSample::validate() const {
  if (X.rows() != y.size()) {
    throw ConfigError("sample: X and y have different numbers of rows");
  }
  if (X.cols() < 1) throw ConfigError("sample: design has no columns");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y(i))) {
      std::ostringstream os;
      os << "sample: non-finite response at row " << i + 1;
      throw ConfigError(os.str());
    }
    if (X(i, 0) != 1.0) {
      std::ostringstream os;
      os << "sample: intercept column is not one at row " << i + 1;
      throw ConfigError(os.str());
    }
    for (Eigen::Index j = 1; j < X.cols(); ++j) {
      if (!std::isfinite(X(i, j))) {
        std::ostringstream os;
        os << "sample: non-finite covariate at row " << i + 1 << ", column " << j + 1;
        throw ConfigError(os.str());
      }
    }
  }
}

RegressionSample make_trend_sample(const Eigen::VectorXd& y) {
  RegressionSample s;
  s.y = y;
  s.X = Eigen::MatrixXd::Ones(y.size(), 1);
  return s;
}

RegressionSample make_sample(const Eigen::VectorXd& y,
                             const Eigen::MatrixXd& covariates) {
  if (covariates.rows() != y.size() && covariates.cols() > 0) {
    throw ConfigError("sample: covariates and y have different numbers of rows");
  }
  RegressionSample s;
  s.y = y;
  s.X.resize(y.size(), covariates.cols() + 1);
  s.X.col(0).setOnes();
  if (covariates.cols() > 0) s.X.rightCols(covariates.cols()) = covariates;
  return s;
}

}  // namespace lrd
