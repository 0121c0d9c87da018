#pragma once

#include "lrdtest/sample.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fixture {

// Random regression sample: smooth coefficients, AR-ish covariates, noise.
inline lrd::RegressionSample random_sample(std::size_t n, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd W(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p - 1));
  for (Eigen::Index c = 0; c < W.cols(); ++c) {
    double prev = 0.0;
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      prev = 0.4 * prev + g(rng);
      W(i, c) = 0.5 + prev;
    }
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i + 1) / static_cast<double>(n);
    double v = std::sin(3.0 * t) + g(rng);
    for (Eigen::Index c = 0; c < W.cols(); ++c) v += (1.0 + t * (c + 1)) * W(i, c);
    y(i) = v;
  }
  return lrd::make_sample(y, W);
}

inline std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

inline std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace fixture
