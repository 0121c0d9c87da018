#include "lrdtest/teststats.hpp"

#include "lrdtest/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

namespace lrd {

std::string to_string(TestKind kind) {
  switch (kind) {
    case TestKind::kpss: return "KPSS";
    case TestKind::rs: return "RS";
    case TestKind::vs: return "VS";
    case TestKind::ks: return "KS";
  }
  return "?";
}

TestKind parse_test_kind(const std::string& name) {
  std::string key;
  for (char c : name) {
    if (c != '/' && c != '-' && c != '_') {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (key == "kpss") return TestKind::kpss;
  if (key == "rs") return TestKind::rs;
  if (key == "vs") return TestKind::vs;
  if (key == "ks") return TestKind::ks;
  throw ConfigError("unknown test '" + name + "' (expected kpss, rs, vs or ks)");
}

TrimRange trim_range(std::size_t n, double b) {
  if (!(b > 0.0)) throw ConfigError("trim_range: bandwidth must be positive");
  const double nb = std::floor(static_cast<double>(n) * b);
  if (static_cast<double>(n) - 2.0 * nb < 2.0) {
    std::ostringstream os;
    os << "trim_range: n - 2 floor(nb) < 2 for n=" << n << ", b=" << b;
    throw ConfigError(os.str());
  }
  const auto k = static_cast<std::size_t>(nb);
  return {k, n - k - 1};
}

StatisticSet path_functionals(std::span<const double> path, std::size_t n) {
  StatisticSet out;
  if (path.empty()) return out;
  double sum = 0.0, sum2 = 0.0, hi = path[0], lo = path[0], amax = 0.0;
  for (double s : path) {
    sum += s;
    sum2 += s * s;
    hi = std::max(hi, s);
    lo = std::min(lo, s);
    amax = std::max(amax, std::abs(s));
  }
  const double N = static_cast<double>(path.size());
  const double scale = 1.0 / (static_cast<double>(n) * N);
  out[TestKind::kpss] = scale * sum2;
  out[TestKind::rs] = hi - lo;
  // Centred second pass; the one-pass form cancels when the mean dominates.
  const double mean = sum / N;
  double centred = 0.0;
  for (double s : path) centred += (s - mean) * (s - mean);
  out[TestKind::vs] = std::min(scale * centred, out[TestKind::kpss]);
  out[TestKind::ks] = amax;
  return out;
}

StatisticSet all_stats(std::span<const double> residuals, double b) {
  const auto range = trim_range(residuals.size(), b);
  std::vector<double> path(range.size());
  double s = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    s += residuals[range.first + k];
    path[k] = s;
  }
  return path_functionals(path, residuals.size());
}

double kpss_stat(std::span<const double> r, double b) { return all_stats(r, b)[TestKind::kpss]; }
double rs_stat(std::span<const double> r, double b) { return all_stats(r, b)[TestKind::rs]; }
double vs_stat(std::span<const double> r, double b) { return all_stats(r, b)[TestKind::vs]; }
double ks_stat(std::span<const double> r, double b) { return all_stats(r, b)[TestKind::ks]; }

}  // namespace lrd
