#pragma once

#include "lrdtest/locreg.hpp"
#include "lrdtest/sample.hpp"
#include "lrdtest/teststats.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lrd {

enum class ModelKind { trend, covariate };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// Smoothing parameters of one test run.
struct BandwidthSet {
  double b = 0.0;
  std::size_t m = 0;
  double tau = 0.0;
  double eta = 0.0;
  std::size_t B_mv = 100;
};

/// Bootstrap replicates of all four functionals, in replicate order.
struct BootstrapDraws {
  std::array<std::vector<double>, 4> stat;
  const std::vector<double>& operator[](TestKind k) const { return stat[static_cast<int>(k)]; }
};

enum class TrendKernel {
  plain,      ///< K_b; undersized in practice, kept for comparison
  jackknife,  ///< K*_b, matching the jackknife residuals (default)
};

/// Error term of the covariate-model bootstrap path.
enum class ErrorTerm {
  /// First element of Sigma_root(t_i) V_i: the same Gaussian vector drives
  /// the error and the smoothing term, as x_i e_i does in the data.
  root_row,
  /// sigma_H(t_i) V_{i,1}, independent of the other coordinates of V_i.
  sigma_h,
};

struct BootstrapOptions {
  std::size_t B = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  ErrorTerm error_term = ErrorTerm::root_row;
};

/// Trend-model multiplier bootstrap from sigma_hat(t_i). Replicate r draws
/// its n multipliers from stream (seed, r).
BootstrapDraws boot_trend(const Eigen::VectorXd& sigma, double b,
                          const BootstrapOptions& options,
                          TrendKernel kernel = TrendKernel::jackknife);

/// Covariate-model multiplier bootstrap. Throws NumericError if some M_hat(t_i)
/// in the trimmed range is singular (condition above 1e12).
BootstrapDraws boot_covariate(const Eigen::MatrixXd& X, const MatrixGrid& M_hat,
                              const MatrixGrid& Sigma_root,
                              const Eigen::VectorXd& sigmaH, double b,
                              const BootstrapOptions& options);

/// G_k over the trimmed range for given multipliers V (n x 1).
std::vector<double> trend_path(const Eigen::VectorXd& sigma, double b,
                               const Eigen::MatrixXd& V,
                               TrendKernel kernel = TrendKernel::jackknife);

/// G_k over the trimmed range for given multipliers V (n x p).
std::vector<double> covariate_path(const Eigen::MatrixXd& X, const MatrixGrid& M_hat,
                                   const MatrixGrid& Sigma_root,
                                   const Eigen::VectorXd& sigmaH, double b,
                                   const Eigen::MatrixXd& V,
                                   ErrorTerm error_term = ErrorTerm::root_row);

/// The multipliers replicate r uses: n x p standard normals from (seed, r).
Eigen::MatrixXd draw_multipliers(std::size_t n, std::size_t p, std::uint64_t seed,
                                 std::uint64_t r);

/// 1 - #{boot <= statistic} / B. Throws ConfigError on an empty sample.
double p_value(double statistic, std::span<const double> boot);

/// Level-alpha decision: reject when #{boot <= statistic} reaches
/// floor(B (1 - alpha)), i.e. the statistic is at or beyond that order statistic.
bool rejects(double statistic, std::span<const double> boot, double alpha);

struct TestReport {
  TestKind test = TestKind::kpss;
  ModelKind model = ModelKind::trend;
  double statistic = 0.0;
  std::vector<double> boot;  ///< sorted ascending
  double p_value = 1.0;
  BandwidthSet params;
  std::size_t B = 0;
  std::uint64_t seed = 0;
};

struct RunConfig {
  std::optional<double> b;
  std::optional<std::size_t> m;
  std::optional<double> tau;
  std::optional<double> eta;
  std::size_t B = 2000;
  std::size_t B_mv = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  TrendKernel trend_kernel = TrendKernel::jackknife;
  ErrorTerm error_term = ErrorTerm::root_row;
  Smoother gcv_smoother = Smoother::jackknife;
  /// Candidate grids for minimum-volatility selection; empty means default.
  std::vector<std::size_t> m_grid;
  std::vector<double> tau_grid;
  /// Candidate eta values; empty means eta = b.
  std::vector<double> eta_grid;
};

struct RunResult {
  std::vector<TestReport> reports;
  StatisticSet statistics;
  std::vector<std::string> warnings;
};

/// Selects smoothing parameters (unless fixed in the config), computes the
/// statistics from jackknife residuals and bootstraps p-values. The trend
/// model uses the intercept column only; the covariate model needs p >= 2.
RunResult run_test(const RegressionSample& sample, ModelKind model,
                   const std::vector<TestKind>& tests, const RunConfig& config);

}  // namespace lrd
