#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>

namespace lrd {

enum class TestKind { kpss = 0, rs = 1, vs = 2, ks = 3 };

inline constexpr std::array<TestKind, 4> kAllTests{TestKind::kpss, TestKind::rs,
                                                  TestKind::vs, TestKind::ks};

std::string to_string(TestKind kind);
/// Accepts kpss, rs, vs, ks (case-insensitive, "r/s" style also accepted).
TestKind parse_test_kind(const std::string& name);

/// Trimmed summation range l = floor(nb)+1 .. u = n - floor(nb), stored as
/// 0-based inclusive indices.
struct TrimRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first + 1; }
};

/// Throws ConfigError when n - 2 floor(nb) < 2.
TrimRange trim_range(std::size_t n, double b);

/// The four statistics, indexed by TestKind.
struct StatisticSet {
  std::array<double, 4> value{};
  double operator[](TestKind k) const { return value[static_cast<int>(k)]; }
  double& operator[](TestKind k) { return value[static_cast<int>(k)]; }
};

/// Functionals of a partial-sum path S over the trimmed range (path[k] is
/// S at the k-th trimmed index):
///   KPSS  [n N]^-1 sum S^2,  R/S  max S - min S,
///   V/S   [n N]^-1 {sum S^2 - N^-1 (sum S)^2},  K/S  max |S|,
/// with N the path length.
StatisticSet path_functionals(std::span<const double> path, std::size_t n);

/// Statistics of residuals over the trimmed range for bandwidth b.
StatisticSet all_stats(std::span<const double> residuals, double b);

double kpss_stat(std::span<const double> residuals, double b);
double rs_stat(std::span<const double> residuals, double b);
double vs_stat(std::span<const double> residuals, double b);
double ks_stat(std::span<const double> residuals, double b);

}  // namespace lrd
