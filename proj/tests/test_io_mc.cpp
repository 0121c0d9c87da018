#include "doctest.h"

#include "fixtures.hpp"
#include "lrdtest/error.hpp"
#include "lrdtest/io.hpp"
#include "lrdtest/mc_harness.hpp"

#include "json.hpp"

#include <algorithm>
#include <sstream>

using namespace lrd;

namespace {

std::string message_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    io::read_csv(in, "data.csv");
  } catch (const IoError& e) {
    return e.what();
  }
  return {};
}

std::string rows(std::size_t k) {
  std::string s;
  for (std::size_t i = 0; i < k; ++i) s += std::to_string(i) + "," + std::to_string(0.5 * i) + "\n";
  return s;
}

}  // namespace

TEST_CASE("csv round trip is lossless") {
  const auto s = fixture::random_sample(30, 3, 4);
  std::ostringstream out;
  io::write_csv(out, s);
  std::istringstream in(out.str());
  const auto t = io::read_csv(in);
  REQUIRE(t.sample.n() == 30);
  REQUIRE(t.sample.p() == 3);
  CHECK(t.header.size() == 3);
  CHECK(t.sample.y == s.y);
  CHECK(t.sample.X == s.X);
}

TEST_CASE("csv errors name the line and column") {
  const std::string head = "y,x\n";
  auto m = message_of(head + rows(3) + "1,NA\n" + rows(6));
  CHECK(m.find("line 5") != std::string::npos);
  CHECK(m.find("column 2") != std::string::npos);
  m = message_of(head + rows(4) + ",2\n" + rows(6));
  CHECK(m.find("line 6") != std::string::npos);
  CHECK(m.find("column 1") != std::string::npos);
  m = message_of(head + rows(2) + "abc,1\n" + rows(6));
  CHECK(m.find("abc") != std::string::npos);
  CHECK(m.find("line 4") != std::string::npos);
  CHECK_FALSE(message_of(head + rows(7)).empty());
  CHECK(message_of(head + rows(8)).empty());
  CHECK_FALSE(message_of("").empty());
  CHECK_THROWS_AS(io::ingest_csv("/nonexistent/file.csv"), IoError);
}

TEST_CASE("report and tune documents carry their schema") {
  sim::SimulationSpec spec;
  spec.n = 150;
  const auto data = sim::simulate_model(spec);
  RunConfig rc;
  rc.B = 100;
  rc.B_mv = 10;
  const auto res = run_test(data.sample, ModelKind::covariate, {TestKind::kpss, TestKind::ks}, rc);
  const auto j = nlohmann::json::parse(io::report_json(res, data.sample, {"x.csv", 0.05}));
  CHECK(j["schema"] == io::kReportSchema);
  CHECK(j["n"] == 150);
  CHECK(j["p"] == 2);
  REQUIRE(j["tests"].size() == 2);
  CHECK(j["tests"][1]["test"] == "KS");
  CHECK(j["tests"][0]["p_value"].get<double>() == res.reports[0].p_value);
  const auto tsv = io::report_tsv(res);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 3);
  CHECK(tsv.rfind("test\tstatistic\tp_value\tB\tseed\tb\tm\ttau\teta", 0) == 0);
}

TEST_CASE("replication seeds are distinct and stable") {
  CHECK(replication_seed(1, 0) == replication_seed(1, 0));
  CHECK(replication_seed(1, 0) != replication_seed(1, 1));
  CHECK(replication_seed(1, 0) != replication_seed(2, 0));
}

TEST_CASE("size experiment: shape, half widths and reproducible replications") {
  McConfig c;
  c.sim.n = 100;
  c.R = 50;
  c.B = 100;
  c.run.B_mv = 10;
  c.seed = 3;
  const auto rep = size_experiment(c);
  REQUIRE(rep.rows.size() == 8);
  for (const auto& r : rep.rows) {
    CHECK(r.decisions == 50);
    CHECK(r.rate == doctest::Approx(static_cast<double>(r.rejections) / 50.0));
    CHECK(r.half_width == doctest::Approx(3.0 * std::sqrt(r.level * (1.0 - r.level) / 50.0)));
  }
  // Rebuild the first row from individual replications.
  McPoint pt;
  pt.n = 100;
  std::size_t count = 0;
  for (std::size_t i = 0; i < 50; ++i) count += replicate(c, pt, i)[0][0] ? 1 : 0;
  CHECK(count == rep.rows[0].rejections);
  const auto tsv = io::mc_tsv(rep);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 9);
  const auto j = nlohmann::json::parse(io::mc_json(rep));
  CHECK(j["schema"] == io::kMonteCarloSchema);
  CHECK(j["rows"].size() == 8);

  c.R = 49;
  CHECK_THROWS_AS(size_experiment(c), ConfigError);
  c.R = 50;
  c.levels = {1.0};
  CHECK_THROWS_AS(size_experiment(c), ConfigError);
}

TEST_CASE("full-scale switch") {
  McConfig c;
  const auto w = apply_full_scale(c);
  CHECK(c.sim.n == 1000);
  CHECK(c.R == 1000);
  CHECK(c.B == 2000);
  CHECK_FALSE(w.empty());
}
