// lrdtest: short versus long memory tests for time-varying regressions.
#include "lrdtest/bootstrap.hpp"
#include "lrdtest/error.hpp"
#include "lrdtest/io.hpp"
#include "lrdtest/lsproc_sim.hpp"
#include "lrdtest/mc_harness.hpp"
#include "lrdtest/rng.hpp"
#include "lrdtest/tuning.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using nlohmann::json;

struct Common {
  std::string config_path;
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// Values given on the command line win; otherwise the config file; otherwise
// the built-in default or automatic selection.
class Layered {
 public:
  Layered(CLI::App* app, const std::string& path) : app_(app) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw lrd::IoError("cannot open config '" + path + "'");
    try {
      cfg_ = json::parse(in);
    } catch (const json::exception& e) {
      throw lrd::ConfigError("config '" + path + "': " + e.what());
    }
    if (!cfg_.is_object()) throw lrd::ConfigError("config '" + path + "' must be a JSON object");
  }

  template <class T>
  void apply(const std::string& flag, const std::string& key, T& target) const {
    if (app_->count(flag) > 0 || !cfg_.contains(key)) return;
    try {
      target = cfg_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw lrd::ConfigError("config key '" + key + "': " + e.what());
    }
  }

  template <class T>
  void apply(const std::string& flag, const std::string& key, std::optional<T>& target) const {
    if (app_->count(flag) > 0 || !cfg_.contains(key)) return;
    const auto& v = cfg_.at(key);
    if (v.is_string() && v.get<std::string>() == "auto") {
      target.reset();
      return;
    }
    try {
      target = v.get<T>();
    } catch (const json::exception& e) {
      throw lrd::ConfigError("config key '" + key + "': " + e.what());
    }
  }

 private:
  CLI::App* app_;
  json cfg_ = json::object();
};

unsigned default_threads() {
  if (const char* env = std::getenv("LRDTEST_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring LRDTEST_THREADS='" << env << "'\n";
  }
  return 1;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw lrd::IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw lrd::IoError("write to '" + path + "' failed");
}

std::vector<lrd::TestKind> parse_tests(const std::vector<std::string>& names) {
  std::vector<lrd::TestKind> out;
  for (const auto& name : names) {
    if (name == "all") {
      out.insert(out.end(), lrd::kAllTests.begin(), lrd::kAllTests.end());
    } else {
      out.push_back(lrd::parse_test_kind(name));
    }
  }
  if (out.empty()) throw lrd::ConfigError("no tests selected");
  return out;
}

lrd::sim::Model parse_sim_model(const std::string& s) {
  if (s == "M0" || s == "m0") return lrd::sim::Model::M0;
  if (s == "M1" || s == "m1") return lrd::sim::Model::M1;
  if (s == "M2" || s == "m2") return lrd::sim::Model::M2;
  throw lrd::ConfigError("unknown simulation model '" + s + "' (expected M0, M1 or M2)");
}

lrd::sim::MemoryParameter parse_d(const std::string& s) {
  if (s == "cosine") return lrd::sim::MemoryParameter::cosine_profile();
  try {
    std::size_t pos = 0;
    const double d = std::stod(s, &pos);
    if (pos == s.size()) return d;
  } catch (const std::exception&) {
  }
  throw lrd::ConfigError("invalid d '" + s + "' (a number in [0, 1/2) or 'cosine')");
}

lrd::TrendKernel parse_trend_kernel(const std::string& s) {
  if (s == "plain") return lrd::TrendKernel::plain;
  if (s == "jackknife") return lrd::TrendKernel::jackknife;
  throw lrd::ConfigError("unknown trend kernel '" + s + "' (plain or jackknife)");
}

lrd::ErrorTerm parse_error_term(const std::string& s) {
  if (s == "root_row") return lrd::ErrorTerm::root_row;
  if (s == "sigma_h") return lrd::ErrorTerm::sigma_h;
  throw lrd::ConfigError("unknown error term '" + s + "' (root_row or sigma_h)");
}

struct RunOptions {
  std::optional<double> b, tau, eta;
  std::optional<std::size_t> m;
  std::size_t B = 2000;
  std::size_t B_mv = 100;
  std::string trend_kernel = "jackknife";
  std::string error_term = "root_row";
  std::vector<std::size_t> m_grid;
  std::vector<double> tau_grid, eta_grid;
};

void add_run_options(CLI::App* sub, RunOptions& o) {
  sub->add_option("--b", o.b, "Regression bandwidth (default: GCV)");
  sub->add_option("--m", o.m, "Difference window (default: minimum volatility)");
  sub->add_option("--tau", o.tau, "Smoothing bandwidth of the covariance estimator (default: minimum volatility)");
  sub->add_option("--eta", o.eta, "Bandwidth of M(t) (default: b, or selected from --eta-grid)");
  sub->add_option("--B", o.B, "Bootstrap replicates");
  sub->add_option("--B-mv", o.B_mv, "Bootstrap replicates per minimum-volatility cell");
  sub->add_option("--trend-kernel", o.trend_kernel, "Trend-model bootstrap kernel: plain or jackknife");
  sub->add_option("--error-term", o.error_term, "Covariate bootstrap error term: root_row or sigma_h");
  sub->add_option("--m-grid", o.m_grid, "Candidate m values")->delimiter(',');
  sub->add_option("--tau-grid", o.tau_grid, "Candidate tau values")->delimiter(',');
  sub->add_option("--eta-grid", o.eta_grid, "Candidate eta values")->delimiter(',');
}

void layer_run_options(const Layered& cfg, RunOptions& o) {
  cfg.apply("--b", "b", o.b);
  cfg.apply("--m", "m", o.m);
  cfg.apply("--tau", "tau", o.tau);
  cfg.apply("--eta", "eta", o.eta);
  cfg.apply("--B", "B", o.B);
  cfg.apply("--B-mv", "B_mv", o.B_mv);
  cfg.apply("--trend-kernel", "trend_kernel", o.trend_kernel);
  cfg.apply("--error-term", "error_term", o.error_term);
  cfg.apply("--m-grid", "m_grid", o.m_grid);
  cfg.apply("--tau-grid", "tau_grid", o.tau_grid);
  cfg.apply("--eta-grid", "eta_grid", o.eta_grid);
}

lrd::RunConfig to_run_config(const RunOptions& o, const Common& c) {
  lrd::RunConfig rc;
  rc.b = o.b;
  rc.m = o.m;
  rc.tau = o.tau;
  rc.eta = o.eta;
  rc.B = o.B;
  rc.B_mv = o.B_mv;
  rc.seed = c.seed;
  rc.threads = c.threads;
  rc.trend_kernel = parse_trend_kernel(o.trend_kernel);
  rc.error_term = parse_error_term(o.error_term);
  rc.m_grid = o.m_grid;
  rc.tau_grid = o.tau_grid;
  rc.eta_grid = o.eta_grid;
  return rc;
}

void layer_common(const Layered& cfg, Common& c) {
  cfg.apply("--output", "output", c.output);
  cfg.apply("--format", "format", c.format);
  cfg.apply("--seed", "seed", c.seed);
  cfg.apply("--threads", "threads", c.threads);
  if (c.format != "json" && c.format != "tsv") throw lrd::ConfigError("format must be json or tsv");
  if (c.threads == 0) throw lrd::ConfigError("threads must be positive");
}

void add_common(CLI::App* sub, Common& c, bool seeded) {
  sub->add_option("--config", c.config_path, "JSON file with option defaults");
  sub->add_option("-o,--output", c.output, "Output path (default: stdout)");
  sub->add_option("--format", c.format, "Output format: json or tsv");
  sub->add_option("--threads", c.threads, "Worker threads (default: $LRDTEST_THREADS or 1)");
  if (seeded) sub->add_option("--seed", c.seed, "Master random seed");
}

lrd::ModelKind resolve_model(const std::string& model, const lrd::RegressionSample& s) {
  if (model.empty() || model == "auto") {
    return s.p() > 1 ? lrd::ModelKind::covariate : lrd::ModelKind::trend;
  }
  return lrd::parse_model_kind(model);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Tests of short versus long memory in time-varying coefficient regressions"};
  app.require_subcommand(1);

  // test
  Common tc;
  tc.threads = default_threads();
  RunOptions to;
  std::string t_input, t_model = "auto";
  std::vector<std::string> t_tests{"all"};
  double t_alpha = 0.05;
  auto* test = app.add_subcommand("test", "Run the bootstrap tests on a CSV file");
  test->add_option("-i,--input", t_input, "CSV with header; first column y, then covariates");
  test->add_option("--model", t_model, "trend, covariate or auto (covariate when covariates are present)");
  test->add_option("--tests", t_tests, "Tests to run: kpss, rs, vs, ks or all")->delimiter(',');
  test->add_option("--alpha", t_alpha, "Level used for the verdict lines");
  add_common(test, tc, true);
  add_run_options(test, to);

  // simulate
  Common sc;
  std::string s_model = "M1", s_d = "0", s_type = "I";
  std::size_t s_n = 500;
  std::optional<std::size_t> s_trunc;
  auto* simulate = app.add_subcommand("simulate", "Simulate a sample from a built-in design");
  simulate->add_option("--model", s_model, "M0, M1 or M2");
  simulate->add_option("--n", s_n, "Sample size");
  simulate->add_option("--d", s_d, "Memory parameter: a number in [0, 1/2) or 'cosine'");
  simulate->add_option("--type", s_type, "Fractional process type: I or II");
  simulate->add_option("--truncation", s_trunc, "Fractional filter truncation (default max(2000, n))");
  add_common(simulate, sc, true);

  // mc
  Common mc;
  mc.threads = default_threads();
  RunOptions mo;
  mo.B = 500;
  std::string m_model = "M1", m_kind = "covariate", m_d = "0";
  std::size_t m_n = 500, m_reps = 300;
  std::vector<double> m_d_grid, m_levels{0.05, 0.10};
  std::vector<std::size_t> m_n_grid;
  std::vector<std::string> m_tests{"all"};
  bool m_full = false;
  auto* mcs = app.add_subcommand("mc", "Monte Carlo size or power experiment");
  mcs->add_option("--model", m_model, "M0, M1 or M2");
  mcs->add_option("--kind", m_kind, "Fitted model: trend or covariate");
  mcs->add_option("--n", m_n, "Sample size");
  mcs->add_option("--reps", m_reps, "Replications (at least 50)");
  mcs->add_option("--d", m_d, "Memory parameter for an n-grid or single point");
  mcs->add_option("--d-grid", m_d_grid, "Grid of constant d values")->delimiter(',');
  mcs->add_option("--n-grid", m_n_grid, "Grid of sample sizes")->delimiter(',');
  mcs->add_option("--levels", m_levels, "Nominal levels")->delimiter(',');
  mcs->add_option("--tests", m_tests, "Tests to run")->delimiter(',');
  mcs->add_flag("--full-scale", m_full, "Use n=1000, R=1000, B=2000");
  add_common(mcs, mc, true);
  add_run_options(mcs, mo);

  // tune
  Common uc;
  uc.threads = default_threads();
  RunOptions uo;
  std::string u_input, u_model = "auto";
  auto* tune = app.add_subcommand("tune", "Select b, (m, tau) and eta without testing");
  tune->add_option("-i,--input", u_input, "CSV input");
  tune->add_option("--model", u_model, "trend, covariate or auto");
  add_common(tune, uc, true);
  add_run_options(tune, uo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }

  if (*test) {
    Layered cfg(test, tc.config_path);
    layer_common(cfg, tc);
    layer_run_options(cfg, to);
    cfg.apply("--input", "input", t_input);
    cfg.apply("--model", "model", t_model);
    cfg.apply("--tests", "tests", t_tests);
    cfg.apply("--alpha", "alpha", t_alpha);
    if (t_input.empty()) throw lrd::ConfigError("test: --input is required");
    if (!(t_alpha > 0.0 && t_alpha < 1.0)) throw lrd::ConfigError("alpha must lie in (0, 1)");
    const auto tests = parse_tests(t_tests);
    const auto rc = to_run_config(to, tc);
    const auto table = lrd::io::ingest_csv(t_input);
    const auto model = resolve_model(t_model, table.sample);
    std::cerr << "seed: " << tc.seed << '\n';
    const auto result = lrd::run_test(table.sample, model, tests, rc);
    print_warnings(result.warnings);
    for (const auto& r : result.reports) {
      const bool rej = lrd::rejects(r.statistic, r.boot, t_alpha);
      std::cerr << lrd::to_string(r.test) << ": statistic=" << r.statistic << " p=" << r.p_value
                << (rej ? "  reject" : "  do not reject") << " short memory at level " << t_alpha
                << '\n';
    }
    emit(tc.format == "json"
             ? lrd::io::report_json(result, table.sample, {t_input, t_alpha})
             : lrd::io::report_tsv(result),
         tc.output);
    return 0;
  }

  if (*simulate) {
    Layered cfg(simulate, sc.config_path);
    layer_common(cfg, sc);
    cfg.apply("--model", "model", s_model);
    cfg.apply("--n", "n", s_n);
    cfg.apply("--d", "d", s_d);
    cfg.apply("--type", "type", s_type);
    cfg.apply("--truncation", "truncation", s_trunc);
    lrd::sim::SimulationSpec spec;
    spec.model = parse_sim_model(s_model);
    spec.n = s_n;
    spec.d = parse_d(s_d);
    spec.seed = sc.seed;
    spec.truncation = s_trunc;
    if (s_type == "I") {
      spec.type = lrd::sim::FractionalType::type_i;
    } else if (s_type == "II") {
      spec.type = lrd::sim::FractionalType::type_ii;
    } else {
      throw lrd::ConfigError("type must be I or II");
    }
    std::cerr << "seed: " << sc.seed << '\n';
    const auto data = lrd::sim::simulate_model(spec);
    print_warnings(data.warnings);
    std::ostringstream os;
    lrd::io::write_csv(os, data.sample);
    emit(os.str(), sc.output);
    return 0;
  }

  if (*mcs) {
    Layered cfg(mcs, mc.config_path);
    layer_common(cfg, mc);
    layer_run_options(cfg, mo);
    cfg.apply("--model", "model", m_model);
    cfg.apply("--kind", "kind", m_kind);
    cfg.apply("--n", "n", m_n);
    cfg.apply("--reps", "reps", m_reps);
    cfg.apply("--d", "d", m_d);
    cfg.apply("--d-grid", "d_grid", m_d_grid);
    cfg.apply("--n-grid", "n_grid", m_n_grid);
    cfg.apply("--levels", "levels", m_levels);
    cfg.apply("--tests", "tests", m_tests);
    cfg.apply("--full-scale", "full_scale", m_full);
    if (!m_d_grid.empty() && !m_n_grid.empty()) throw lrd::ConfigError("mc: give either --d-grid or --n-grid");
    lrd::McConfig c;
    c.sim.model = parse_sim_model(m_model);
    c.sim.n = m_n;
    c.kind = lrd::parse_model_kind(m_kind);
    c.tests = parse_tests(m_tests);
    c.R = m_reps;
    c.B = mo.B;
    c.seed = mc.seed;
    c.levels = m_levels;
    c.threads = mc.threads;
    c.run = to_run_config(mo, mc);
    if (m_full) std::cerr << "warning: " << lrd::apply_full_scale(c) << '\n';
    std::cerr << "seed: " << mc.seed << '\n';
    lrd::MonteCarloReport report;
    if (!m_d_grid.empty()) {
      std::vector<lrd::McPoint> pts;
      for (double d : m_d_grid) pts.push_back({c.sim.n, d, d});
      report = lrd::power_experiment(c, pts, "d");
    } else if (!m_n_grid.empty()) {
      const auto d = parse_d(m_d);
      std::vector<lrd::McPoint> pts;
      for (std::size_t n : m_n_grid) pts.push_back({n, d, static_cast<double>(n)});
      report = lrd::power_experiment(c, pts, "n");
    } else {
      const auto d = parse_d(m_d);
      report = d.is_zero() ? lrd::size_experiment(c)
                           : lrd::power_experiment(c, {{c.sim.n, d, d.at(0.5)}}, "d");
    }
    print_warnings(report.warnings);
    emit(mc.format == "json" ? lrd::io::mc_json(report) : lrd::io::mc_tsv(report), mc.output);
    return 0;
  }

  if (*tune) {
    Layered cfg(tune, uc.config_path);
    layer_common(cfg, uc);
    layer_run_options(cfg, uo);
    cfg.apply("--input", "input", u_input);
    cfg.apply("--model", "model", u_model);
    if (u_input.empty()) throw lrd::ConfigError("tune: --input is required");
    const auto rc = to_run_config(uo, uc);
    const auto table = lrd::io::ingest_csv(u_input);
    const auto model = resolve_model(u_model, table.sample);
    const auto sample = model == lrd::ModelKind::trend ? lrd::make_trend_sample(table.sample.y) : table.sample;
    std::cerr << "seed: " << uc.seed << '\n';
    lrd::GcvResult gcv;
    if (rc.b) {
      gcv = lrd::gcv_search(sample, *rc.b, *rc.b);
    } else {
      gcv = lrd::gcv_select_b(sample);
    }
    const double eta = model == lrd::ModelKind::covariate
                           ? (rc.eta ? *rc.eta : lrd::eta_select(sample, gcv.b, rc.eta_grid))
                           : gcv.b;
    lrd::MvGrid grid = lrd::default_mv_grid(sample.n());
    if (!rc.m_grid.empty()) grid.m = rc.m_grid;
    if (!rc.tau_grid.empty()) grid.tau = rc.tau_grid;
    lrd::MvOptions opt;
    opt.B_mv = rc.B_mv;
    opt.seed = lrd::derive_seed(rc.seed, 0x6d76);
    opt.threads = rc.threads;
    opt.trend_kernel = rc.trend_kernel;
    opt.error_term = rc.error_term;
    const auto mv = lrd::mv_select(sample, model, gcv.b, eta, grid, opt);
    emit(lrd::io::tune_json(gcv, &mv, eta, model, uc.seed), uc.output);
    return 0;
  }
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lrd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.category()) {
      case lrd::ErrorCategory::io: return 2;
      case lrd::ErrorCategory::numeric: return 3;
      case lrd::ErrorCategory::config: return 4;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
