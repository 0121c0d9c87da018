#include "doctest.h"

#include "fixtures.hpp"
#include "lrdtest/error.hpp"
#include "lrdtest/teststats.hpp"
#include "naive_oracles.hpp"

using namespace lrd;

namespace {
StatisticSet stats(const std::vector<double>& e, double b) { return all_stats(e, b); }
}  // namespace

TEST_CASE("trim range") {
  const auto r = trim_range(100, 0.155);
  CHECK(r.first == 15);
  CHECK(r.last == 84);
  CHECK(r.size() == 70);
  CHECK(trim_range(10, 0.45).size() == 2);
  CHECK_THROWS_AS(trim_range(10, 0.5), ConfigError);
  CHECK_THROWS_AS(trim_range(10, 0.0), ConfigError);
}

TEST_CASE("zero residuals give zero statistics") {
  const auto s = stats(std::vector<double>(50, 0.0), 0.1);
  for (double v : s.value) CHECK(v == 0.0);
}

TEST_CASE("hand-computed cases") {
  std::vector<double> e(20, 0.0);
  e[0] = 1.0;
  CHECK(kpss_stat(e, 0.01) == doctest::Approx(1.0 / 20.0));
  std::vector<double> alt(20);
  for (std::size_t i = 0; i < 20; ++i) alt[i] = i % 2 ? -1.0 : 1.0;
  CHECK(rs_stat(alt, 0.01) == 1.0);
  std::vector<double> one(20, 0.0);
  one[2] = -2.0;  // first trimmed index for b = 0.1 (floor(2) + 1 = 3, 1-based)
  CHECK(ks_stat(one, 0.1) == 2.0);
  std::vector<double> c(20, 0.0);
  c[0] = 3.0;  // S constant over the full range
  CHECK(vs_stat(c, 0.01) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("statistics match the double-loop oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 50 + seed % 11;
    const auto e = fixture::normals(n, seed);
    const double b = 0.05 + 0.01 * static_cast<double>(seed % 7);
    const auto s = stats(e, b);
    const auto o = oracle::stats(e, b);
    CHECK(oracle::rel_err(s[TestKind::kpss], o.kpss) < 1e-12);
    CHECK(s[TestKind::rs] == o.rs);
    CHECK(oracle::rel_err(s[TestKind::vs], o.vs) < 1e-12);
    CHECK(s[TestKind::ks] == o.ks);
    CHECK(kpss_stat(e, b) == s[TestKind::kpss]);
    CHECK(rs_stat(e, b) == s[TestKind::rs]);
    CHECK(vs_stat(e, b) == s[TestKind::vs]);
    CHECK(ks_stat(e, b) == s[TestKind::ks]);
  }
}

TEST_CASE("scale equivariance, sign flip and ordering") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto e = fixture::normals(200, seed);
    const auto s = stats(e, 0.1);
    std::vector<double> sc(e), ng(e);
    for (auto& v : sc) v *= 4.0;  // exact in binary
    for (auto& v : ng) v = -v;
    const auto a = stats(sc, 0.1), c = stats(ng, 0.1);
    CHECK(a[TestKind::kpss] == 16.0 * s[TestKind::kpss]);
    CHECK(a[TestKind::vs] == 16.0 * s[TestKind::vs]);
    CHECK(a[TestKind::rs] == 4.0 * s[TestKind::rs]);
    CHECK(a[TestKind::ks] == 4.0 * s[TestKind::ks]);
    for (int k = 0; k < 4; ++k) CHECK(c.value[k] == s.value[k]);
    CHECK(s[TestKind::vs] <= s[TestKind::kpss]);
    CHECK(s[TestKind::ks] <= s[TestKind::rs]);
    CHECK(s[TestKind::rs] <= 2.0 * s[TestKind::ks]);
  }
}

TEST_CASE("test kind names") {
  CHECK(parse_test_kind("KPSS") == TestKind::kpss);
  CHECK(parse_test_kind("r/s") == TestKind::rs);
  CHECK(parse_test_kind("vs") == TestKind::vs);
  CHECK(parse_test_kind("Ks") == TestKind::ks);
  CHECK_THROWS_AS(parse_test_kind("adf"), ConfigError);
  for (auto k : kAllTests) CHECK(parse_test_kind(to_string(k)) == k);
}
