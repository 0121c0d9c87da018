#pragma once

#include "lrdtest/bootstrap.hpp"
#include "lrdtest/locreg.hpp"
#include "lrdtest/sample.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lrd {

struct GcvOptions {
  std::size_t grid_points = 20;
  Smoother smoother = Smoother::jackknife;
};

struct GcvResult {
  double b = 0.0;
  double c_hat = 0.0;  ///< NaN when the fallback was taken
  double lower = 0.0;
  double upper = 0.0;
  bool fallback = false;
  std::vector<double> grid;
  std::vector<double> scores;
  std::vector<std::string> warnings;
};

/// Range bound for b: the half bandwidth b/sqrt2 must cover 2p+2 points and
/// the trimmed range must stay nonempty.
double min_bandwidth(std::size_t n, std::size_t p);
inline constexpr double kMaxBandwidth = 0.45;

/// GCV over `points` log-spaced bandwidths in [lower, upper]; ties go to the
/// smaller b.
GcvResult gcv_search(const RegressionSample& sample, double lower, double upper,
                     const GcvOptions& options = {});

/// Pilot constant
///   c = [15 sum_i tr Sigma_hat(i/n) / (n^2 sum_i |beta'(t_i) - beta'(t_{i-1})|^2)]^{1/5}
/// from a local-linear pilot at b = n^-1/5 and a difference-based Sigma_hat at
/// m = floor(n^{2/7}), tau = n^{-1/6}. NaN when undefined.
double pilot_constant(const RegressionSample& sample, std::vector<std::string>* warnings = nullptr);

/// GCV over [c n^-1/4, c n^-1/6] clamped to [min_bandwidth, 0.45]; falls back
/// to b = n^-1/5 when c is undefined.
GcvResult gcv_select_b(const RegressionSample& sample, const GcvOptions& options = {});

/// Default minimum-volatility grids: m = floor(5/7 n^{2/7})..floor(2 n^{2/7}),
/// tau in {6/7, 1, 8/7} n^{-1/6}, both restricted to tau + (m+1)/n < 1/2.
struct MvGrid {
  std::vector<std::size_t> m;
  std::vector<double> tau;
};
MvGrid default_mv_grid(std::size_t n);

struct MvSelection {
  std::size_t m = 0;
  double tau = 0.0;
  double volatility = 0.0;
};

struct MvResult {
  MvGrid grid;
  /// s2[test](i, j): variance of the bootstrap statistics at (m_i, tau_j).
  std::array<Eigen::MatrixXd, 4> s2;
  std::array<MvSelection, 4> selected;
  std::vector<std::string> warnings;
};

struct MvOptions {
  std::size_t B_mv = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  TrendKernel trend_kernel = TrendKernel::jackknife;
  ErrorTerm error_term = ErrorTerm::root_row;
};

/// Minimum-volatility selection of (m, tau) for every test from one set of
/// bootstrap streams shared by all grid cells.
MvResult mv_select(const RegressionSample& sample, ModelKind model, double b,
                   double eta, const MvGrid& grid, const MvOptions& options);

/// Index minimising the sample standard deviation of each cell and its
/// (truncated) 4-neighbourhood. Interior m rows are candidates when there are
/// at least three; ties go to the first index in (m, tau) order.
std::pair<std::size_t, std::size_t> mv_argmin(const Eigen::MatrixXd& s2, double* volatility = nullptr);

/// eta = b without a grid; otherwise the minimiser of
///   V(i) = max_k sum_{r=-2}^{2} |M_{eta_{i+r}}(t_k) - mean|^2
/// with the window truncated at the grid ends; ties go to the first.
double eta_select(const RegressionSample& sample, double b, std::span<const double> eta_grid);

}  // namespace lrd
