#pragma once

#include "lrdtest/bootstrap.hpp"
#include "lrdtest/lsproc_sim.hpp"
#include "lrdtest/teststats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lrd {

struct McConfig {
  /// Data-generating process; n, d and seed are overridden per point and
  /// replication.
  sim::SimulationSpec sim;
  ModelKind kind = ModelKind::covariate;
  std::vector<TestKind> tests{kAllTests.begin(), kAllTests.end()};
  std::size_t R = 300;
  std::size_t B = 500;
  std::uint64_t seed = 1;
  std::vector<double> levels{0.05, 0.10};
  unsigned threads = 1;
  /// Bandwidth overrides and selection settings passed to run_test; its B,
  /// seed and threads are replaced per replication.
  RunConfig run;
};

/// One design point of an experiment: sample size and memory parameter.
struct McPoint {
  std::size_t n = 500;
  sim::MemoryParameter d = 0.0;
  double x = 0.0;  ///< value reported in the x column
};

struct McRow {
  TestKind test = TestKind::kpss;
  double level = 0.05;
  double x = 0.0;
  std::size_t n = 0;
  std::size_t rejections = 0;
  std::size_t decisions = 0;
  double rate = 0.0;
  double half_width = 0.0;  ///< 3 sqrt(level (1 - level) / decisions)
};

struct MonteCarloReport {
  std::string model;
  std::string kind;
  std::string x_label;
  std::size_t R = 0;
  std::size_t B = 0;
  std::uint64_t seed = 0;
  std::vector<McRow> rows;
  std::vector<std::size_t> failures;  ///< per point
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Replication seed; a pure function of (master seed, index), shared by all
/// points of an experiment.
std::uint64_t replication_seed(std::uint64_t master, std::size_t index);

/// Rejection decisions of one replication, decision[test][level]. Throws on a
/// failed fit. Re-running it reproduces the harness bit-exactly.
std::vector<std::vector<bool>> replicate(const McConfig& config, const McPoint& point,
                                         std::size_t index);

/// d = 0 at n = config.sim.n. Requires R >= 50; aborts with NumericError
/// when more than 1% of replications fail.
MonteCarloReport size_experiment(const McConfig& config);

/// Rejection rates over a grid of (n, d) points; x_label names the varying
/// quantity ("d" or "n").
MonteCarloReport power_experiment(const McConfig& config, const std::vector<McPoint>& points,
                                  const std::string& x_label);

/// Switches to n = 1000, R = 1000, B = 2000 and returns the runtime warning.
std::string apply_full_scale(McConfig& config);

}  // namespace lrd
