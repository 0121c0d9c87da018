#pragma once

#include "lrdtest/bootstrap.hpp"
#include "lrdtest/mc_harness.hpp"
#include "lrdtest/sample.hpp"
#include "lrdtest/tuning.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lrd::io {

inline constexpr const char* kReportSchema = "lrdtest.report/1";
inline constexpr const char* kMonteCarloSchema = "lrdtest.mc/1";
inline constexpr const char* kTuneSchema = "lrdtest.tune/1";

struct CsvTable {
  std::vector<std::string> header;  ///< y first, then covariates
  RegressionSample sample;          ///< intercept column prepended
};

/// Reads a headed CSV: first column y, further columns covariates, rows in
/// time order. Missing ("NA", empty) or non-numeric cells and fewer than 8
/// rows raise IoError naming the line and column.
CsvTable read_csv(std::istream& in, const std::string& source = "<input>");
CsvTable ingest_csv(const std::string& path);

/// Writes y and the covariates (intercept dropped) with 17 significant
/// digits, so that reading the file back is lossless.
void write_csv(std::ostream& out, const RegressionSample& sample,
               const std::vector<std::string>& header = {});

struct ReportMeta {
  std::string source;
  double alpha = 0.05;
};

std::string report_json(const RunResult& result, const RegressionSample& sample,
                        const ReportMeta& meta);
/// Columns: test, statistic, p_value, B, seed, b, m, tau, eta.
std::string report_tsv(const RunResult& result);

/// Columns: test, level, x, rate, half_width.
std::string mc_tsv(const MonteCarloReport& report);
std::string mc_json(const MonteCarloReport& report);

std::string tune_json(const GcvResult& gcv, const MvResult* mv, double eta, ModelKind model,
                      std::uint64_t seed);

}  // namespace lrd::io
