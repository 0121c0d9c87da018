#include "lrdtest/tuning.hpp"

#include "lrdtest/error.hpp"
#include "lrdtest/kernel.hpp"
#include "lrdtest/lrcov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lrd {
namespace {

double clamp_b(double b, std::size_t n, std::size_t p) {
  return std::clamp(b, std::min(min_bandwidth(n, p), kMaxBandwidth), kMaxBandwidth);
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double sample_variance(const std::vector<double>& v) {
  const double sd = sample_sd(v);
  return sd * sd;
}

}  // namespace

double min_bandwidth(std::size_t n, std::size_t p) {
  return kernel::kSqrt2 * (2.0 * static_cast<double>(p) + 2.0) / static_cast<double>(n);
}

GcvResult gcv_search(const RegressionSample& sample, double lower, double upper,
                     const GcvOptions& options) {
  if (!(lower > 0.0) || !(upper > 0.0)) throw ConfigError("gcv: bandwidth bounds must be positive");
  GcvResult out;
  out.lower = std::min(lower, upper);
  out.upper = std::max(lower, upper);
  const std::size_t K = out.lower < out.upper ? std::max<std::size_t>(options.grid_points, 2) : 1;
  for (std::size_t k = 0; k < K; ++k) {
    const double frac = K == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(K - 1);
    out.grid.push_back(out.lower * std::pow(out.upper / out.lower, frac));
  }
  out.grid.back() = out.upper;
  double best = std::numeric_limits<double>::infinity();
  for (double b : out.grid) {
    double score = std::numeric_limits<double>::infinity();
    try {
      score = gcv_score(sample, b, options.smoother);
    } catch (const Error& e) {
      out.warnings.push_back(std::string("gcv: skipped b=") + std::to_string(b) + ": " + e.what());
    }
    out.scores.push_back(score);
    if (score < best) {
      best = score;
      out.b = b;
    }
  }
  if (!std::isfinite(best)) throw NumericError("gcv: no bandwidth in the search range could be fitted");
  return out;
}

double pilot_constant(const RegressionSample& sample, std::vector<std::string>* warnings) {
  const std::size_t n = sample.n(), p = sample.p();
  const double dn = static_cast<double>(n);
  const double b0 = clamp_b(std::pow(dn, -0.2), n, p);
  const auto fit = local_linear(sample, b0);

  const auto k0 = static_cast<std::size_t>(std::floor(dn * b0));
  double den = 0.0;
  // 1-based i = floor(nb)+2 .. n-floor(nb)
  for (std::size_t i = k0 + 2; i + k0 <= n; ++i) {
    den += (fit.slope.row(static_cast<Eigen::Index>(i - 1)) -
            fit.slope.row(static_cast<Eigen::Index>(i - 2))).squaredNorm();
  }

  const auto m0 = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(std::pow(dn, 2.0 / 7.0))));
  const double tau0 = std::min(std::pow(dn, -1.0 / 6.0), 0.49);
  const MatrixGrid S = sigma_hat(sample, m0, tau0, warnings);
  double num = 0.0;
  for (const auto& M : S) num += M.trace();

  const double scale = sample.y.squaredNorm() / dn;
  if (!(num > 1e-14 * dn * scale) || !(den > 1e-20 * dn * scale)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::pow(15.0 * num / (dn * dn * den), 0.2);
}

GcvResult gcv_select_b(const RegressionSample& sample, const GcvOptions& options) {
  const std::size_t n = sample.n(), p = sample.p();
  const double dn = static_cast<double>(n);
  std::vector<std::string> warnings;
  const double c = pilot_constant(sample, &warnings);
  GcvResult out;
  if (!(c > 0.0) || !std::isfinite(c)) {
    const double b = clamp_b(std::pow(dn, -0.2), n, p);
    out = gcv_search(sample, b, b, options);
    out.fallback = true;
    out.c_hat = std::numeric_limits<double>::quiet_NaN();
    warnings.push_back("gcv: pilot constant undefined; using b = n^-1/5");
  } else {
    out = gcv_search(sample, clamp_b(c * std::pow(dn, -0.25), n, p),
                     clamp_b(c * std::pow(dn, -1.0 / 6.0), n, p), options);
    out.c_hat = c;
  }
  out.warnings.insert(out.warnings.begin(), warnings.begin(), warnings.end());
  return out;
}

MvGrid default_mv_grid(std::size_t n) {
  const double dn = static_cast<double>(n);
  const double r = std::pow(dn, 2.0 / 7.0);
  const std::size_t m_cap = n / 4;
  const std::size_t lo = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(5.0 * r / 7.0)));
  const std::size_t hi = std::min(m_cap, std::max(lo, static_cast<std::size_t>(std::floor(2.0 * r))));
  if (lo > hi) throw ConfigError("mv grid: sample too small for a difference window");
  MvGrid g;
  for (std::size_t m = lo; m <= hi; ++m) g.m.push_back(m);
  const double tau_cap = 0.5 - static_cast<double>(hi + 1) / dn - 1e-6;
  if (!(tau_cap > 0.0)) throw ConfigError("mv grid: sample too small for the tau grid");
  const double base = std::pow(dn, -1.0 / 6.0);
  for (double f : {6.0 / 7.0, 1.0, 8.0 / 7.0}) {
    const double tau = std::min(f * base, tau_cap);
    if (g.tau.empty() || tau > g.tau.back()) g.tau.push_back(tau);
  }
  return g;
}

std::pair<std::size_t, std::size_t> mv_argmin(const Eigen::MatrixXd& s2, double* volatility) {
  const auto M = static_cast<std::size_t>(s2.rows()), T = static_cast<std::size_t>(s2.cols());
  if (M == 0 || T == 0) throw ConfigError("mv: empty grid");
  const std::size_t p_lo = M >= 3 ? 1 : 0, p_hi = M >= 3 ? M - 2 : M - 1;
  double best = std::numeric_limits<double>::infinity();
  std::pair<std::size_t, std::size_t> arg{p_lo, 0};
  bool found = false;
  for (std::size_t i = p_lo; i <= p_hi; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      std::vector<double> nb;
      auto at = [&](std::size_t a, std::size_t b) {
        return s2(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      };
      if (i > 0) nb.push_back(at(i - 1, j));
      nb.push_back(at(i, j));
      if (i + 1 < M) nb.push_back(at(i + 1, j));
      if (j > 0) nb.push_back(at(i, j - 1));
      if (j + 1 < T) nb.push_back(at(i, j + 1));
      const bool finite = std::all_of(nb.begin(), nb.end(), [](double v) { return std::isfinite(v); });
      const double v = finite ? sample_sd(nb) : std::numeric_limits<double>::infinity();
      if (!found || v < best) {
        best = v;
        arg = {i, j};
        found = true;
      }
    }
  }
  if (volatility) *volatility = best;
  return arg;
}

MvResult mv_select(const RegressionSample& sample, ModelKind model, double b, double eta,
                   const MvGrid& grid_in, const MvOptions& options) {
  MvResult out;
  out.grid = grid_in;
  std::sort(out.grid.m.begin(), out.grid.m.end());
  std::sort(out.grid.tau.begin(), out.grid.tau.end());
  const auto M = static_cast<Eigen::Index>(out.grid.m.size());
  const auto T = static_cast<Eigen::Index>(out.grid.tau.size());
  if (M == 0 || T == 0) throw ConfigError("mv: empty grid");
  for (auto& s : out.s2) s = Eigen::MatrixXd::Constant(M, T, std::numeric_limits<double>::infinity());

  BootstrapOptions bo;
  bo.B = options.B_mv;
  bo.seed = options.seed;
  bo.threads = options.threads;
  bo.error_term = options.error_term;
  std::size_t ok = 0;
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < T; ++j) {
      const std::size_t m = out.grid.m[static_cast<std::size_t>(i)];
      const double tau = out.grid.tau[static_cast<std::size_t>(j)];
      try {
        BootstrapDraws draws;
        if (model == ModelKind::trend) {
          const auto est = estimate_trend_lrv(sample, m, tau);
          draws = boot_trend(est.sigmaH, b, bo, options.trend_kernel);
        } else {
          const auto est = estimate_covariate_lrv(sample, m, tau, eta);
          draws = boot_covariate(sample.X, est.M_hat, est.Sigma_root, est.sigmaH, b, bo);
        }
        for (int t = 0; t < 4; ++t) out.s2[static_cast<std::size_t>(t)](i, j) = sample_variance(draws.stat[static_cast<std::size_t>(t)]);
        ++ok;
      } catch (const Error& e) {
        std::ostringstream os;
        os << "mv: cell m=" << m << ", tau=" << tau << " failed: " << e.what();
        out.warnings.push_back(os.str());
      }
    }
  }
  if (ok == 0) throw NumericError("mv: every grid cell failed");
  for (int t = 0; t < 4; ++t) {
    double vol = 0.0;
    const auto [i, j] = mv_argmin(out.s2[static_cast<std::size_t>(t)], &vol);
    out.selected[static_cast<std::size_t>(t)] = {out.grid.m[i], out.grid.tau[j], vol};
  }
  return out;
}

double eta_select(const RegressionSample& sample, double b, std::span<const double> eta_grid) {
  if (eta_grid.empty()) return b;
  const std::size_t G = eta_grid.size(), n = sample.n();
  std::vector<MatrixGrid> grids;
  grids.reserve(G);
  for (double eta : eta_grid) grids.push_back(m_hat_grid(sample.X, eta));
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < G; ++i) {
    const std::size_t lo = i >= 2 ? i - 2 : 0, hi = std::min(G - 1, i + 2);
    double v = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(sample.X.cols(), sample.X.cols());
      for (std::size_t r = lo; r <= hi; ++r) mean += grids[r][k];
      mean /= static_cast<double>(hi - lo + 1);
      double s = 0.0;
      for (std::size_t r = lo; r <= hi; ++r) s += (grids[r][k] - mean).squaredNorm();
      v = std::max(v, s);
    }
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  return eta_grid[arg];
}

}  // namespace lrd
