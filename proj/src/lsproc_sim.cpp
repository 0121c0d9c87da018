#include "lrdtest/lsproc_sim.hpp"

#include "lrdtest/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

namespace lrd::sim {
namespace {

void check_d(double d, const char* where) {
  if (!(d >= 0.0 && d < 0.5)) {
    std::ostringstream os;
    os << where << ": memory parameter d=" << d << " outside [0, 1/2)";
    throw ConfigError(os.str());
  }
}

// FFTW's planner is not re-entrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t v) {
  std::size_t r = 1;
  while (r < v) r <<= 1;
  return r;
}

// out[i] = sum_{k=0}^{J} psi[k] seg[J + i - k], i < n, by circular convolution
// of length N >= n + J (no wrap-around reaches the retained outputs).
std::vector<double> fft_filter(const std::vector<double>& psi,
                               std::span<const double> seg, std::size_t n) {
  const std::size_t J = psi.size() - 1;
  const std::size_t N = next_pow2(seg.size());
  const std::size_t H = N / 2 + 1;

  double* a = fftw_alloc_real(N);
  double* c = fftw_alloc_real(N);
  fftw_complex* fa = fftw_alloc_complex(H);
  fftw_complex* fc = fftw_alloc_complex(H);
  fftw_plan pa, pc, pinv;
  {
    std::lock_guard lock(fftw_planner_mutex());
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(N), a, fa, FFTW_ESTIMATE);
    pc = fftw_plan_dft_r2c_1d(static_cast<int>(N), c, fc, FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r_1d(static_cast<int>(N), fa, a, FFTW_ESTIMATE);
  }
  std::fill(a, a + N, 0.0);
  std::fill(c, c + N, 0.0);
  std::copy(psi.begin(), psi.end(), a);
  std::copy(seg.begin(), seg.end(), c);
  fftw_execute(pa);
  fftw_execute(pc);
  for (std::size_t k = 0; k < H; ++k) {
    const double re = fa[k][0] * fc[k][0] - fa[k][1] * fc[k][1];
    const double im = fa[k][0] * fc[k][1] + fa[k][1] * fc[k][0];
    fa[k][0] = re;
    fa[k][1] = im;
  }
  fftw_execute(pinv);

  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(N);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[J + i] * scale;

  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pc);
    fftw_destroy_plan(pinv);
  }
  fftw_free(a);
  fftw_free(c);
  fftw_free(fa);
  fftw_free(fc);
  return out;
}

// Direct O(nJ) filtering pays off below this many multiply-adds.
constexpr double kFftCrossover = 4.0e6;

// Number of lags after which |a|^k drops below 1e-17.
std::size_t ar_lags(double a) {
  const double r = std::abs(a);
  if (r == 0.0) return 1;
  if (r >= 1.0) throw ConfigError("simulate: autoregressive coefficient |a(t)| >= 1");
  return static_cast<std::size_t>(std::ceil(std::log(1e-17) / std::log(r))) + 1;
}

double clamp01(double t) { return std::clamp(t, 0.0, 1.0); }

}  // namespace

FractionalWeights psi_weights(double d, std::size_t truncation) {
  check_d(d, "psi_weights");
  FractionalWeights w;
  w.d = d;
  w.psi.resize(truncation + 1);
  w.psi[0] = 1.0;
  for (std::size_t j = 1; j <= truncation; ++j) {
    w.psi[j] = w.psi[j - 1] * (static_cast<double>(j) - 1.0 + d) /
               static_cast<double>(j);
  }
  return w;
}

MemoryParameter::MemoryParameter(double d) : value_(d) {
  check_d(d, "MemoryParameter");
  std::ostringstream os;
  os << d;
  label_ = os.str();
}

MemoryParameter::MemoryParameter(std::function<double(double)> d_of_t,
                                 std::string label)
    : fn_(std::move(d_of_t)), label_(std::move(label)) {
  for (int k = 0; k <= 1000; ++k) check_d(fn_(k / 1000.0), "MemoryParameter");
}

MemoryParameter MemoryParameter::cosine_profile() {
  return MemoryParameter(
      [](double t) { return 0.35 + 0.1 * std::cos(2.0 * std::numbers::pi * t); },
      "0.35+0.1cos(2pi t)");
}

std::size_t default_truncation(std::size_t n) {
  return std::max<std::size_t>(2000, n);
}

FilteredSeries fractional_integrate(std::span<const double> u,
                                    const MemoryParameter& d, std::size_t n,
                                    std::size_t truncation,
                                    const FractionalOptions& options) {
  const std::size_t J = truncation;
  if (u.size() < n + J) {
    std::ostringstream os;
    os << "fractional_integrate: input holds " << u.size()
       << " values, need n + J = " << n + J;
    throw ConfigError(os.str());
  }
  const auto seg = u.subspan(u.size() - (n + J), n + J);
  FilteredSeries out;
  out.e.assign(n, 0.0);

  if (d.is_zero()) {
    std::copy(seg.begin() + J, seg.end(), out.e.begin());
    return out;
  }

  const double dn = static_cast<double>(n);
  if (options.type == FractionalType::type_ii) {
    // Only u_1..u_i enter e_i; weights beyond J are needed up to lag n-1.
    if (d.is_constant()) {
      const auto w = psi_weights(d.at(0.0), n);
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= i; ++k) s += w.psi[k] * seg[J + i - k];
        out.e[i] = s;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double di = d.at(static_cast<double>(i + 1) / dn);
        double psi = 1.0, s = seg[J + i];
        for (std::size_t k = 1; k <= i; ++k) {
          psi *= (static_cast<double>(k) - 1.0 + di) / static_cast<double>(k);
          s += psi * seg[J + i - k];
        }
        out.e[i] = s;
      }
    }
    return out;
  }

  if (d.is_constant()) {
    const auto w = psi_weights(d.at(0.0), J);
    if (w.psi.back() > options.tail_threshold) {
      std::ostringstream os;
      os << "fractional_integrate: psi_J = " << w.psi.back() << " at J = " << J
         << " exceeds tail threshold " << options.tail_threshold;
      out.warnings.push_back(os.str());
    }
    if (static_cast<double>(n) * static_cast<double>(J + 1) > kFftCrossover) {
      out.e = fft_filter(w.psi, seg, n);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= J; ++k) s += w.psi[k] * seg[J + i - k];
        out.e[i] = s;
      }
    }
    return out;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double di = d.at(static_cast<double>(i + 1) / dn);
    double psi = 1.0, s = seg[J + i];
    for (std::size_t k = 1; k <= J; ++k) {
      psi *= (static_cast<double>(k) - 1.0 + di) / static_cast<double>(k);
      s += psi * seg[J + i - k];
    }
    out.e[i] = s;
  }
  return out;
}

FilterSpec builtin_filters(Model model) {
  using std::numbers::pi;
  FilterSpec f;
  f.beta = {[](double t) { return 4.0 * std::sin(pi * t); },
            [](double t) { return 4.0 * std::exp(-2.0 * (t - 0.5) * (t - 0.5)); }};
  switch (model) {
    case Model::M0:
      f.w_ar = [](double t) { return 0.25 + 0.25 * std::cos(2.0 * pi * t); };
      f.w_scale = 0.25;
      f.w_drift = [](double t) { return (t - 0.5) * (t - 0.5); };
      f.b_ar = [](double t) { return 0.35 - 0.4 * (t - 0.5) * (t - 0.5); };
      f.b_scale = 0.8;
      break;
    case Model::M1:
    case Model::M2:
      f.w_ar = [](double t) { return 0.1 + 0.1 * std::cos(2.0 * pi * t); };
      f.w_scale = 0.2;
      f.w_drift = [](double t) { return 0.7 * (t - 0.5) * (t - 0.5); };
      f.heteroscedastic = true;
      f.b_scale = 0.8;
      if (model == Model::M1) {
        f.b_ar = [](double t) { return 0.3 - 0.4 * (t - 0.5) * (t - 0.5); };
      } else {
        f.b_ar = [](double t) { return 0.15 - 0.4 * (t - 0.5) * (t - 0.5); };
        f.garch = true;
        f.garch_c = [](double t) { return 0.9 + 0.1 * std::cos(pi / 3.0 + 2.0 * pi * t); };
        f.garch_alpha = [](double t) { return 0.1 + 0.2 * t; };
        f.garch_beta = [](double t) { return 0.1 + 0.2 * t; };
      }
      break;
    case Model::custom:
      throw ConfigError("builtin_filters: custom model has no built-in filters");
  }
  return f;
}

namespace {

const FilterSpec& resolve_filters(const SimulationSpec& spec, FilterSpec& storage) {
  if (spec.model == Model::custom) {
    if (!spec.custom) throw ConfigError("simulate: custom model requires filters");
    return *spec.custom;
  }
  storage = builtin_filters(spec.model);
  return storage;
}

}  // namespace

void validate(const SimulationSpec& spec) {
  if (spec.n < 8) throw ConfigError("simulate: n must be at least 8");
  if (spec.p < 1) throw ConfigError("simulate: p must be at least 1");
  FilterSpec storage;
  const FilterSpec& f = resolve_filters(spec, storage);
  if (spec.model != Model::custom && spec.p > 2) {
    throw ConfigError("simulate: built-in models have p <= 2");
  }
  if (f.beta.size() < spec.p) {
    throw ConfigError("simulate: fewer coefficient functions than p");
  }
  if (!f.b_ar || ((spec.p > 1 || f.heteroscedastic) && (!f.w_ar || !f.w_drift))) {
    throw ConfigError("simulate: incomplete filter specification");
  }
  const std::size_t J = spec.truncation.value_or(default_truncation(spec.n));
  if (spec.burn_in && *spec.burn_in < J) {
    throw ConfigError("simulate: burn_in must be at least the truncation J");
  }
  for (int k = 0; k <= 1000; ++k) {
    const double t = k / 1000.0;
    check_d(spec.d.at(t), "simulate");
    if (std::abs(f.b_ar(t)) >= 1.0 || (f.w_ar && std::abs(f.w_ar(t)) >= 1.0)) {
      throw ConfigError("simulate: autoregressive coefficient not below 1 in modulus");
    }
    if (f.garch) {
      const double a = f.garch_alpha(t), b = f.garch_beta(t), c = f.garch_c(t);
      if (!(a >= 0.0 && b >= 0.0 && c > 0.0)) {
        throw ConfigError("simulate: GARCH coefficients must be nonnegative with c > 0");
      }
      if (a + b >= 1.0) {
        std::ostringstream os;
        os << "simulate: GARCH alpha(t)+beta(t) = " << a + b << " >= 1 at t=" << t;
        throw ConfigError(os.str());
      }
    }
  }
}

SimulatedSample simulate_model(const SimulationSpec& spec) {
  validate(spec);
  FilterSpec storage;
  const FilterSpec& f = resolve_filters(spec, storage);

  const std::size_t n = spec.n;
  const bool lrd = !spec.d.is_zero();
  const std::size_t J = lrd ? spec.truncation.value_or(default_truncation(n)) : 0;
  const std::size_t burn = lrd ? spec.burn_in.value_or(J) : 0;

  // Maximal filter depths over [0, 1].
  std::size_t kw = 1, kb = 1, kg = 0;
  for (int k = 0; k <= 200; ++k) {
    const double t = k / 200.0;
    if (f.w_ar) kw = std::max(kw, ar_lags(f.w_ar(t)));
    kb = std::max(kb, ar_lags(f.b_ar(t)));
    if (f.garch) kg = std::max(kg, ar_lags(f.garch_alpha(t) + f.garch_beta(t)));
  }
  const std::size_t depth_eps = kb + kg;

  // Shocks u_j for j = 1-burn..n live at index j-1+burn. Innovations are
  // drawn for the observed range first and then backwards in time, so a
  // longer pre-sample never changes the draws that enter the observed range.
  const std::size_t total = n + burn;
  const std::size_t lead_eps = depth_eps, lead_zeta = kw;
  std::vector<double> eps(total + lead_eps), zeta(total + lead_zeta);
  {
    Rng r_eps = make_stream(spec.seed, 1), r_zeta = make_stream(spec.seed, 2);
    std::normal_distribution<double> gauss;
    auto draw = [&](Rng& r) { return spec.innovation ? spec.innovation(r) : gauss(r); };
    for (std::size_t k = 0; k < eps.size(); ++k) eps[eps.size() - 1 - k] = draw(r_eps);
    for (std::size_t k = 0; k < zeta.size(); ++k) zeta[zeta.size() - 1 - k] = draw(r_zeta);
  }
  const double dn = static_cast<double>(n);
  auto time_of = [&](std::size_t idx) {
    // idx is the position in the shock array; j = idx + 1 - burn.
    return clamp01((static_cast<double>(idx) + 1.0 - static_cast<double>(burn)) / dn);
  };

  // Covariate W(t, F_j) at frozen t. Copy c >= 1 uses an independent stream
  // offset for extra covariates.
  const std::size_t q = spec.p > 1 ? spec.p - 1 : 0;
  std::vector<std::vector<double>> extra_zeta;
  for (std::size_t c = 1; c < q; ++c) {
    Rng r = make_stream(spec.seed, 2 + c);
    std::normal_distribution<double> gauss;
    std::vector<double> z(zeta.size());
    for (auto& v : z) v = spec.innovation ? spec.innovation(r) : gauss(r);
    extra_zeta.push_back(std::move(z));
  }
  auto covariate = [&](const std::vector<double>& z, std::size_t idx, double t) {
    const double a = f.w_ar(t);
    const std::size_t pos = idx + lead_zeta;
    double s = 0.0, ak = 1.0;
    for (std::size_t k = 0; k < kw; ++k) {
      s += ak * z[pos - k];
      ak *= a;
    }
    return f.w_scale * s + f.w_drift(t) / (1.0 - a);
  };

  // Core error B(t, G_j) at frozen t.
  std::vector<double> g(kb);
  auto core = [&](std::size_t idx, double t) {
    const std::size_t pos = idx + lead_eps;
    if (f.garch) {
      const double c = f.garch_c(t), al = f.garch_alpha(t), be = f.garch_beta(t);
      double s2 = c / (1.0 - al - be);
      double gprev = 0.0;
      // Run the variance recursion through the kg + kb most recent shocks,
      // keeping the last kb values of G.
      const std::size_t len = kg + kb;
      for (std::size_t k = 0; k < len; ++k) {
        const std::size_t at = pos - (len - 1 - k);
        if (k > 0) s2 = c + al * gprev * gprev + be * s2;
        gprev = eps[at] * std::sqrt(s2);
        if (k >= kg) g[k - kg] = gprev;
      }
    } else {
      for (std::size_t k = 0; k < kb; ++k) g[kb - 1 - k] = eps[pos - k];
    }
    const double a = f.b_ar(t);
    double s = 0.0, ak = 1.0;
    for (std::size_t k = 0; k < kb; ++k) {
      s += ak * g[kb - 1 - k];
      ak *= a;
    }
    return f.b_scale * s;
  };

  std::vector<double> u(total), bcore(total), w0(total, 0.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const double t = time_of(idx);
    bcore[idx] = core(idx, t);
    if (f.w_ar) w0[idx] = covariate(zeta, idx, t);
    u[idx] = f.heteroscedastic ? bcore[idx] * std::sqrt(1.0 + w0[idx] * w0[idx])
                               : bcore[idx];
  }

  FractionalOptions fo;
  fo.type = spec.type;
  auto filtered = fractional_integrate(u, spec.d, n, J, fo);

  SimulatedSample out;
  out.warnings = std::move(filtered.warnings);
  out.e = std::move(filtered.e);
  out.u.assign(u.begin() + burn, u.end());
  out.b.assign(bcore.begin() + burn, bcore.end());

  auto& s = out.sample;
  s.y.resize(n);
  s.X.resize(n, spec.p);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = i + burn;
    const double t = static_cast<double>(i + 1) / dn;
    s.X(i, 0) = 1.0;
    if (spec.p > 1) s.X(i, 1) = w0[idx];
    for (std::size_t c = 1; c < q; ++c) s.X(i, c + 1) = covariate(extra_zeta[c - 1], idx, t);
    double mean = 0.0;
    for (std::size_t c = 0; c < spec.p; ++c) mean += f.beta[c](t) * s.X(i, c);
    s.y(i) = mean + out.e[i];
  }
  return out;
}

}  // namespace lrd::sim
