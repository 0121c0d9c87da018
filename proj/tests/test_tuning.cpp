#include "doctest.h"

#include "fixtures.hpp"
#include "lrdtest/error.hpp"
#include "lrdtest/lsproc_sim.hpp"
#include "lrdtest/tuning.hpp"

#include <algorithm>

using namespace lrd;

TEST_CASE("GCV search: grid, ties and the objective at the optimum") {
  const auto s = fixture::random_sample(150, 2, 3);
  const auto g = gcv_search(s, 0.1, 0.3);
  CHECK(g.grid.size() == 20);
  CHECK(g.grid.front() == doctest::Approx(0.1));
  CHECK(g.grid.back() == 0.3);
  CHECK(std::is_sorted(g.grid.begin(), g.grid.end()));
  const auto it = std::min_element(g.scores.begin(), g.scores.end());
  CHECK(g.b == g.grid[static_cast<std::size_t>(it - g.scores.begin())]);
  // The objective is recomputed from the smoother used for the residuals.
  CHECK(gcv_score(s, g.b) == *it);
  const auto one = gcv_search(s, 0.2, 0.2);
  CHECK(one.grid.size() == 1);
  CHECK(one.b == 0.2);
  CHECK_THROWS_AS(gcv_search(s, 0.0, 0.2), ConfigError);
}

TEST_CASE("GCV on a linear trend favours the largest bandwidth") {
  // Without smoothing bias the expected GCV curve falls with b; average the
  // curve over noise draws to see it.
  const std::size_t n = 300, R = 40;
  std::vector<double> mean;
  GcvResult g;
  for (std::uint64_t r = 0; r < R; ++r) {
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
    y += Eigen::Map<const Eigen::VectorXd>(fixture::normals(n, r).data(), n);
    g = gcv_search(make_trend_sample(y), 0.08, 0.3);
    if (mean.empty()) mean.assign(g.scores.size(), 0.0);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += g.scores[k] / R;
  }
  for (std::size_t k = 1; k < mean.size(); ++k) CHECK(mean[k] < mean[k - 1]);
}

TEST_CASE("GCV selection: pilot range and fallback") {
  sim::SimulationSpec spec;
  spec.n = 500;
  spec.seed = 2;
  const auto data = sim::simulate_model(spec);
  const auto g = gcv_select_b(data.sample);
  CHECK_FALSE(g.fallback);
  const double n = 500.0;
  CHECK(g.lower == doctest::Approx(std::max(g.c_hat * std::pow(n, -0.25), min_bandwidth(500, 2))));
  CHECK(g.upper == doctest::Approx(std::min(g.c_hat * std::pow(n, -1.0 / 6.0), kMaxBandwidth)));
  CHECK(g.b >= g.lower);
  CHECK(g.b <= g.upper);

  const auto c = make_trend_sample(Eigen::VectorXd::Constant(100, 2.0));
  const auto f = gcv_select_b(c);
  CHECK(f.fallback);
  CHECK(std::isnan(f.c_hat));
  CHECK(f.b == doctest::Approx(std::pow(100.0, -0.2)));
  CHECK_FALSE(f.warnings.empty());
}

TEST_CASE("default MV grid") {
  const auto g = default_mv_grid(577);
  const double r = std::pow(577.0, 2.0 / 7.0);
  CHECK(g.m.front() == static_cast<std::size_t>(std::floor(5.0 * r / 7.0)));
  CHECK(g.m.back() == static_cast<std::size_t>(std::floor(2.0 * r)));
  REQUIRE(g.tau.size() == 3);
  CHECK(g.tau[0] == doctest::Approx(6.0 / 7.0 * std::pow(577.0, -1.0 / 6.0)));
  CHECK(g.tau[2] == doctest::Approx(8.0 / 7.0 * std::pow(577.0, -1.0 / 6.0)));
  for (double t : g.tau) CHECK(t + static_cast<double>(g.m.back() + 1) / 577.0 < 0.5);
  const auto small = default_mv_grid(20);
  for (double t : small.tau) CHECK(t + static_cast<double>(small.m.back() + 1) / 20.0 < 0.5);
}

TEST_CASE("MV argmin: neighbourhood volatility and ties") {
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Constant(5, 3, 1.0);
  std::size_t i, j;
  std::tie(i, j) = mv_argmin(s2);
  CHECK(i == 1);  // first interior m row
  CHECK(j == 0);
  // Make every cell volatile except around (3, 2).
  for (Eigen::Index a = 0; a < 5; ++a)
    for (Eigen::Index b = 0; b < 3; ++b) s2(a, b) = static_cast<double>((a * 7 + b * 13) % 5);
  s2(3, 2) = s2(2, 2) = s2(4, 2) = s2(3, 1) = 2.0;
  double vol = -1.0;
  std::tie(i, j) = mv_argmin(s2, &vol);
  CHECK(i == 3);
  CHECK(j == 2);
  CHECK(vol == 0.0);
  s2(3, 2) = std::numeric_limits<double>::infinity();
  std::tie(i, j) = mv_argmin(s2);
  CHECK_FALSE((i == 3 && j == 2));
}

TEST_CASE("MV selection is deterministic and stays on the grid") {
  sim::SimulationSpec spec;
  spec.n = 300;
  spec.seed = 8;
  const auto data = sim::simulate_model(spec);
  const auto grid = default_mv_grid(300);
  MvOptions o;
  o.B_mv = 30;
  o.seed = 5;
  const auto a = mv_select(data.sample, ModelKind::covariate, 0.15, 0.15, grid, o);
  const auto b = mv_select(data.sample, ModelKind::covariate, 0.15, 0.15, grid, o);
  for (int k = 0; k < 4; ++k) {
    CHECK(a.selected[k].m == b.selected[k].m);
    CHECK(a.selected[k].tau == b.selected[k].tau);
    CHECK(std::find(grid.m.begin(), grid.m.end(), a.selected[k].m) != grid.m.end());
    CHECK(std::find(grid.tau.begin(), grid.tau.end(), a.selected[k].tau) != grid.tau.end());
  }
  const auto t = mv_select(make_trend_sample(data.sample.y), ModelKind::trend, 0.15, 0.15, grid, o);
  CHECK(t.s2[0].allFinite());
}

TEST_CASE("MV with identical cells returns the first candidate") {
  // A constant series has sigma_H = 0 in every cell, so every s2 is zero.
  const auto s = make_trend_sample(Eigen::VectorXd::Constant(200, 1.0));
  MvGrid g{{3, 4, 5, 6}, {0.2, 0.25, 0.3}};
  MvOptions o;
  o.B_mv = 10;
  const auto r = mv_select(s, ModelKind::trend, 0.1, 0.1, g, o);
  for (int k = 0; k < 4; ++k) {
    CHECK(r.selected[k].m == 4);
    CHECK(r.selected[k].tau == 0.2);
  }
}

TEST_CASE("eta selection") {
  const auto s = fixture::random_sample(500, 2, 4);
  CHECK(eta_select(s, 0.137, {}) == 0.137);
  // A grid of equal bandwidths gives identical M_hat, so V is zero everywhere.
  CHECK(eta_select(s, 0.1, std::vector<double>{0.15, 0.15, 0.15}) == 0.15);
  sim::SimulationSpec spec;
  spec.model = sim::Model::M0;
  const auto data = sim::simulate_model(spec);
  const std::vector<double> g7{0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2};
  const double sel = eta_select(data.sample, 0.14, g7);
  CHECK(sel >= 0.08);
  CHECK(sel <= 0.2);
}
