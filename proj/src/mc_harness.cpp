#include "lrdtest/mc_harness.hpp"

#include "lrdtest/error.hpp"
#include "lrdtest/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace lrd {
namespace {

std::string model_name(sim::Model m) {
  switch (m) {
    case sim::Model::M0: return "M0";
    case sim::Model::M1: return "M1";
    case sim::Model::M2: return "M2";
    case sim::Model::custom: return "custom";
  }
  return "custom";
}

void check_config(const McConfig& c) {
  if (c.R < 50) throw ConfigError("mc: R must be at least 50");
  if (c.tests.empty()) throw ConfigError("mc: no tests selected");
  if (c.levels.empty()) throw ConfigError("mc: no levels selected");
  for (double a : c.levels) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("mc: levels must lie in (0, 1)");
  }
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t master, std::size_t index) {
  return derive_seed(master, index);
}

std::vector<std::vector<bool>> replicate(const McConfig& config, const McPoint& point,
                                         std::size_t index) {
  const std::uint64_t s = replication_seed(config.seed, index);
  sim::SimulationSpec spec = config.sim;
  spec.n = point.n;
  spec.d = point.d;
  spec.seed = s;
  const auto data = sim::simulate_model(spec);

  RunConfig rc = config.run;
  rc.B = config.B;
  rc.seed = derive_seed(s, 1);
  rc.threads = 1;
  const auto result = run_test(data.sample, config.kind, config.tests, rc);

  std::vector<std::vector<bool>> out(config.tests.size(), std::vector<bool>(config.levels.size()));
  for (std::size_t t = 0; t < config.tests.size(); ++t) {
    const auto& r = result.reports[t];
    for (std::size_t l = 0; l < config.levels.size(); ++l) {
      out[t][l] = rejects(r.statistic, r.boot, config.levels[l]);
    }
  }
  return out;
}

MonteCarloReport power_experiment(const McConfig& config, const std::vector<McPoint>& points,
                                  const std::string& x_label) {
  check_config(config);
  if (points.empty()) throw ConfigError("mc: no design points");
  const auto start = std::chrono::steady_clock::now();

  MonteCarloReport rep;
  rep.model = model_name(config.sim.model);
  rep.kind = to_string(config.kind);
  rep.x_label = x_label;
  rep.R = config.R;
  rep.B = config.B;
  rep.seed = config.seed;

  const std::size_t T = config.tests.size(), L = config.levels.size();
  const std::size_t max_failures = config.R / 100;
  for (const auto& point : points) {
    std::vector<std::vector<std::vector<bool>>> decisions(config.R);
    std::vector<char> ok(config.R, 0);
    std::atomic<std::size_t> next{0}, failed{0};
    std::atomic<bool> abort{false};
    std::mutex mu;
    std::string first_error;
    auto worker = [&] {
      for (std::size_t i = next++; i < config.R && !abort; i = next++) {
        try {
          decisions[i] = replicate(config, point, i);
          ok[i] = 1;
        } catch (const Error& e) {
          std::lock_guard lock(mu);
          if (first_error.empty()) first_error = e.what();
          if (++failed > max_failures) abort = true;
        }
      }
    };
    const unsigned nthreads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.R)));
    if (nthreads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (abort) {
      std::ostringstream os;
      os << "mc: more than 1% of replications failed at n=" << point.n << ", " << x_label << "="
         << point.x << " (first error: " << first_error << ")";
      throw NumericError(os.str());
    }
    rep.failures.push_back(failed);
    if (failed > 0) {
      std::ostringstream os;
      os << "mc: " << failed << " replication(s) without a decision at " << x_label << "=" << point.x
         << " (first error: " << first_error << ")";
      rep.warnings.push_back(os.str());
    }
    const std::size_t n_ok = config.R - failed;
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t l = 0; l < L; ++l) {
        McRow row;
        row.test = config.tests[t];
        row.level = config.levels[l];
        row.x = point.x;
        row.n = point.n;
        row.decisions = n_ok;
        for (std::size_t i = 0; i < config.R; ++i) {
          if (ok[i] && decisions[i][t][l]) ++row.rejections;
        }
        const double a = row.level;
        row.rate = n_ok ? static_cast<double>(row.rejections) / static_cast<double>(n_ok) : 0.0;
        row.half_width = n_ok ? 3.0 * std::sqrt(a * (1.0 - a) / static_cast<double>(n_ok)) : 1.0;
        rep.rows.push_back(row);
      }
    }
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

MonteCarloReport size_experiment(const McConfig& config) {
  return power_experiment(config, {McPoint{config.sim.n, 0.0, 0.0}}, "d");
}

std::string apply_full_scale(McConfig& config) {
  config.sim.n = 1000;
  config.R = 1000;
  config.B = 2000;
  return "full-scale settings (n=1000, R=1000, B=2000) take hours on a single core";
}

}  // namespace lrd
