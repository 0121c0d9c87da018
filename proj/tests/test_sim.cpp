#include "doctest.h"

#include "lrdtest/error.hpp"
#include "lrdtest/lsproc_sim.hpp"
#include "naive_oracles.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

using namespace lrd;
using namespace lrd::sim;

TEST_CASE("psi weights: small cases") {
  const auto w0 = psi_weights(0.0, 5);
  REQUIRE(w0.psi.size() == 6);
  CHECK(w0.psi[0] == 1.0);
  for (std::size_t j = 1; j <= 5; ++j) CHECK(w0.psi[j] == 0.0);
  const auto w = psi_weights(0.4, 2);
  CHECK(w.psi[0] == 1.0);
  CHECK(w.psi[1] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(w.psi[2] == doctest::Approx(0.28).epsilon(1e-15));
  CHECK(w.truncation() == 2);
}

TEST_CASE("psi recursion matches the gamma ratio") {
  const auto w = psi_weights(0.3, 1000);
  double worst = 0.0;
  for (std::size_t j = 0; j <= 1000; ++j) worst = std::max(worst, oracle::rel_err(w.psi[j], oracle::psi(0.3, j)));
  CHECK(worst <= 1e-12);
}

TEST_CASE("psi weights decay monotonically") {
  for (double d : {0.05, 0.2, 0.45}) {
    const auto w = psi_weights(d, 400);
    for (std::size_t j = 1; j < 400; ++j) CHECK(w.psi[j + 1] < w.psi[j]);
  }
}

TEST_CASE("psi weights reject d outside [0, 1/2)") {
  CHECK_THROWS_AS(psi_weights(0.5, 3), ConfigError);
  CHECK_THROWS_AS(psi_weights(-0.01, 3), ConfigError);
}

TEST_CASE("fractional_integrate: identity at d = 0") {
  const std::size_t n = 40, J = 10;
  std::vector<double> u(n + J);
  std::iota(u.begin(), u.end(), 1.0);
  const auto r = fractional_integrate(u, 0.0, n, J);
  for (std::size_t i = 0; i < n; ++i) CHECK(r.e[i] == u[J + i]);
}

TEST_CASE("fractional_integrate: impulse response equals psi") {
  for (std::size_t J : {std::size_t{30}, std::size_t{3000}}) {
    const std::size_t n = 200, k = 20;
    std::vector<double> u(n + J, 0.0);
    u[J + k] = 1.0;
    const auto w = psi_weights(0.3, J);
    const auto r = fractional_integrate(u, 0.3, n, J);
    for (std::size_t i = 0; i < n; ++i) {
      const double expect = i >= k && i - k <= J ? w.psi[i - k] : 0.0;
      CHECK(std::abs(r.e[i] - expect) < 1e-12);
    }
  }
}

TEST_CASE("fractional_integrate: FFT path matches the direct sum") {
  const std::size_t n = 600, J = 8000;
  auto u = std::vector<double>(n + J);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (auto& v : u) v = g(rng);
  const auto r = fractional_integrate(u, 0.35, n, J);
  const auto w = psi_weights(0.35, J);
  for (std::size_t i : {std::size_t{0}, std::size_t{299}, n - 1}) {
    double s = 0.0;
    for (std::size_t k = 0; k <= J; ++k) s += w.psi[k] * u[J + i - k];
    CHECK(std::abs(r.e[i] - s) < 1e-9);
  }
}

TEST_CASE("fractional_integrate: tail warning and short input") {
  std::vector<double> u(60, 1.0);
  CHECK_FALSE(fractional_integrate(u, 0.4, 50, 10).warnings.empty());
  CHECK(fractional_integrate(u, 0.0, 50, 10).warnings.empty());
  CHECK_THROWS_AS(fractional_integrate(u, 0.3, 55, 10), ConfigError);
}

TEST_CASE("fractional_integrate: type II ignores the pre-sample") {
  const std::size_t n = 50, J = 50;
  std::vector<double> u(n + J, 5.0), v(n + J, 0.0);
  for (std::size_t i = 0; i < n; ++i) u[J + i] = v[J + i] = std::sin(0.3 * static_cast<double>(i));
  FractionalOptions o;
  o.type = FractionalType::type_ii;
  const auto a = fractional_integrate(u, 0.3, n, J, o), b = fractional_integrate(v, 0.3, n, J, o);
  for (std::size_t i = 0; i < n; ++i) CHECK(a.e[i] == doctest::Approx(b.e[i]).epsilon(1e-14));
}

TEST_CASE("fractional_integrate: time-varying d freezes weights at t_i") {
  const std::size_t n = 30, J = 30;
  std::vector<double> u(n + J, 0.0);
  u[J + 4] = 1.0;
  const auto d = MemoryParameter::cosine_profile();
  const auto r = fractional_integrate(u, d, n, J);
  for (std::size_t i = 4; i < n; ++i) {
    const double di = d.at(static_cast<double>(i + 1) / n);
    CHECK(r.e[i] == doctest::Approx(oracle::psi(di, i - 4)).epsilon(1e-12));
  }
}

TEST_CASE("exact variance scaling of truncated fractional noise") {
  // Var(n^-1/2 sum e_i) for iid unit u is n^-1 sum_k (sum_{i=1}^{n} psi_{i-k})^2.
  const double d = 0.3;
  const std::size_t J = 50000;
  const auto w = psi_weights(d, J);
  std::vector<double> cum(J + 2, 0.0);
  for (std::size_t j = 0; j <= J; ++j) cum[j + 1] = cum[j] + w.psi[j];
  std::vector<double> lx, ly;
  for (std::size_t n : {256, 512, 1024, 2048}) {
    double v = 0.0;
    // u_{i-k}: shock index s = i - k ranges over 1 - J .. n.
    for (long s = 1 - static_cast<long>(J); s <= static_cast<long>(n); ++s) {
      const long lo = std::max<long>(0, 1 - s), hi = std::min<long>(static_cast<long>(J), static_cast<long>(n) - s);
      if (lo > hi) continue;
      const double c = cum[static_cast<std::size_t>(hi) + 1] - cum[static_cast<std::size_t>(lo)];
      v += c * c;
    }
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(v / static_cast<double>(n)));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 4, my = std::accumulate(ly.begin(), ly.end(), 0.0) / 4;
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < 4; ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  const double slope = sxy / sxx;
  CHECK(slope == doctest::Approx(0.6).epsilon(0.1 / 0.6));
}

TEST_CASE("M0 with zero innovations is the deterministic fixed point") {
  SimulationSpec spec;
  spec.n = 100;
  spec.model = Model::M0;
  spec.innovation = [](Rng&) { return 0.0; };
  const auto s = simulate_model(spec);
  const auto f = builtin_filters(Model::M0);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double t = static_cast<double>(i + 1) / 100.0;
    const double x = (t - 0.5) * (t - 0.5) / (1.0 - f.w_ar(t));
    CHECK(s.e[i] == 0.0);
    CHECK(s.sample.X(static_cast<Eigen::Index>(i), 1) == doctest::Approx(x).epsilon(1e-13));
    CHECK(s.sample.y(static_cast<Eigen::Index>(i)) ==
          doctest::Approx(4.0 * std::sin(std::numbers::pi * t) + 4.0 * std::exp(-2.0 * (t - 0.5) * (t - 0.5)) * x)
              .epsilon(1e-13));
  }
}

TEST_CASE("M1 core error variance matches the frozen AR(1) value") {
  const auto f = builtin_filters(Model::M1);
  const double a = f.b_ar(0.5), target = 0.64 / (1.0 - a * a);
  double ss = 0.0;
  std::size_t cnt = 0;
  for (std::uint64_t r = 0; r < 200; ++r) {
    SimulationSpec spec;
    spec.n = 1000;
    spec.model = Model::M1;
    spec.seed = 1000 + r;
    const auto s = simulate_model(spec);
    for (std::size_t i = 489; i <= 509; ++i) {
      ss += s.b[i] * s.b[i];
      ++cnt;
    }
  }
  CHECK(std::abs(ss / static_cast<double>(cnt) / target - 1.0) < 0.2);
}

TEST_CASE("M2 core error is heavy tailed") {
  std::vector<double> v;
  for (std::uint64_t r = 0; r < 100; ++r) {
    SimulationSpec spec;
    spec.n = 1000;
    spec.model = Model::M2;
    spec.seed = 77 + r;
    const auto s = simulate_model(spec);
    v.insert(v.end(), s.b.end() - 200, s.b.end());
  }
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    m2 += (x - m) * (x - m);
    m4 += std::pow(x - m, 4);
  }
  m2 /= static_cast<double>(v.size());
  m4 /= static_cast<double>(v.size());
  CHECK(std::isfinite(m4));
  CHECK(m4 / (m2 * m2) > 3.0);
}

TEST_CASE("simulation is reproducible and seed dependent") {
  SimulationSpec spec;
  spec.n = 300;
  spec.d = 0.3;
  spec.seed = 9;
  const auto a = simulate_model(spec), b = simulate_model(spec);
  CHECK(a.sample.y == b.sample.y);
  CHECK(a.sample.X == b.sample.X);
  spec.seed = 10;
  CHECK(simulate_model(spec).sample.y != a.sample.y);
}

TEST_CASE("burn-in sensitivity is bounded") {
  SimulationSpec spec;
  spec.n = 200;
  spec.d = 0.3;
  spec.truncation = 400;
  spec.burn_in = 400;
  spec.seed = 4;
  const auto a = simulate_model(spec);
  spec.burn_in = 800;
  const auto b = simulate_model(spec);
  const auto w = psi_weights(0.3, 400);
  double umax = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < spec.n; ++i) {
    umax = std::max(umax, std::abs(a.u[i]));
    diff = std::max(diff, std::abs(a.e[i] - b.e[i]));
  }
  CHECK(diff <= w.psi.back() * umax * 400.0);
}

TEST_CASE("simulation settings validation") {
  SimulationSpec spec;
  spec.n = 7;
  CHECK_THROWS_AS(validate(spec), ConfigError);
  spec.n = 100;
  spec.truncation = 500;
  spec.burn_in = 100;
  CHECK_THROWS_AS(validate(spec), ConfigError);
  spec.burn_in.reset();
  spec.model = Model::custom;
  CHECK_THROWS_AS(validate(spec), ConfigError);
  auto f = builtin_filters(Model::M2);
  f.garch_alpha = [](double) { return 0.6; };
  f.garch_beta = [](double) { return 0.5; };
  spec.custom = f;
  CHECK_THROWS_AS(validate(spec), ConfigError);
  CHECK_THROWS_AS(MemoryParameter(0.5), ConfigError);
}

TEST_CASE("default truncation") {
  CHECK(default_truncation(500) == 2000);
  CHECK(default_truncation(5000) == 5000);
}
