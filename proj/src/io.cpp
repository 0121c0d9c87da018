#include "lrdtest/io.hpp"

#include "lrdtest/error.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace lrd::io {
namespace {

using nlohmann::json;

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  s = s.substr(a, b - a + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string where(const std::string& source, std::size_t line, std::size_t col,
                  const std::string& name) {
  std::ostringstream os;
  os << source << ": line " << line << ", column " << col << " ('" << name << "')";
  return os.str();
}

json safe(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  CsvTable out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw IoError(source + ": empty file");
  out.header = split(line);
  const std::size_t cols = out.header.size();

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols) {
      std::ostringstream os;
      os << source << ": line " << lineno << " has " << cells.size() << " fields, expected " << cols;
      throw IoError(os.str());
    }
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string& s = cells[c];
      if (s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan") {
        throw IoError("missing value at " + where(source, lineno, c + 1, out.header[c]));
      }
      const char* first = s.data();
      if (*first == '+') ++first;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw IoError("non-numeric value '" + s + "' at " + where(source, lineno, c + 1, out.header[c]));
      }
      row[c] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 8) {
    std::ostringstream os;
    os << source << ": " << rows.size() << " data rows, at least 8 are needed";
    throw IoError(os.str());
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd y(n);
  Eigen::MatrixXd W(n, static_cast<Eigen::Index>(cols - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    y(i) = r[0];
    for (std::size_t c = 1; c < cols; ++c) W(i, static_cast<Eigen::Index>(c - 1)) = r[c];
  }
  out.sample = make_sample(y, W);
  return out;
}

CsvTable ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_csv(in, path);
}

void write_csv(std::ostream& out, const RegressionSample& sample,
               const std::vector<std::string>& header) {
  const auto p = sample.X.cols();
  std::vector<std::string> names = header;
  if (names.empty()) {
    names.push_back("y");
    for (Eigen::Index c = 1; c < p; ++c) names.push_back("x" + std::to_string(c));
  }
  if (names.size() != static_cast<std::size_t>(p)) throw ConfigError("write_csv: header size does not match the sample");
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < sample.y.size(); ++i) {
    out << sample.y(i);
    for (Eigen::Index c = 1; c < p; ++c) out << ',' << sample.X(i, c);
    out << '\n';
  }
  if (!out) throw IoError("write_csv: write failed");
}

std::string report_json(const RunResult& result, const RegressionSample& sample,
                        const ReportMeta& meta) {
  json j;
  j["schema"] = kReportSchema;
  j["source"] = meta.source;
  j["n"] = sample.n();
  j["p"] = sample.p();
  j["alpha"] = meta.alpha;
  j["seed"] = result.reports.empty() ? 0 : result.reports.front().seed;
  j["model"] = result.reports.empty() ? "" : to_string(result.reports.front().model);
  json tests = json::array();
  for (const auto& r : result.reports) {
    tests.push_back({{"test", to_string(r.test)},
                     {"statistic", safe(r.statistic)},
                     {"p_value", r.p_value},
                     {"reject", rejects(r.statistic, r.boot, meta.alpha)},
                     {"B", r.B},
                     {"selected",
                      {{"b", r.params.b}, {"m", r.params.m}, {"tau", r.params.tau}, {"eta", r.params.eta}}}});
  }
  j["tests"] = tests;
  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

std::string report_tsv(const RunResult& result) {
  std::ostringstream os;
  os << std::setprecision(10) << "test\tstatistic\tp_value\tB\tseed\tb\tm\ttau\teta\n";
  for (const auto& r : result.reports) {
    os << to_string(r.test) << '\t' << r.statistic << '\t' << r.p_value << '\t' << r.B << '\t'
       << r.seed << '\t' << r.params.b << '\t' << r.params.m << '\t' << r.params.tau << '\t'
       << r.params.eta << '\n';
  }
  return os.str();
}

std::string mc_tsv(const MonteCarloReport& report) {
  std::ostringstream os;
  os << std::setprecision(10) << "test\tlevel\tx\trate\thalf_width\n";
  for (const auto& r : report.rows) {
    os << to_string(r.test) << '\t' << r.level << '\t' << r.x << '\t' << r.rate << '\t'
       << r.half_width << '\n';
  }
  return os.str();
}

std::string mc_json(const MonteCarloReport& report) {
  json j;
  j["schema"] = kMonteCarloSchema;
  j["model"] = report.model;
  j["kind"] = report.kind;
  j["x_label"] = report.x_label;
  j["R"] = report.R;
  j["B"] = report.B;
  j["seed"] = report.seed;
  j["wall_seconds"] = report.wall_seconds;
  j["failures"] = report.failures;
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"test", to_string(r.test)},
                    {"level", r.level},
                    {"x", r.x},
                    {"n", r.n},
                    {"rejections", r.rejections},
                    {"decisions", r.decisions},
                    {"rate", r.rate},
                    {"half_width", r.half_width}});
  }
  j["rows"] = rows;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string tune_json(const GcvResult& gcv, const MvResult* mv, double eta, ModelKind model,
                      std::uint64_t seed) {
  json j;
  j["schema"] = kTuneSchema;
  j["model"] = to_string(model);
  j["seed"] = seed;
  j["b"] = gcv.b;
  j["c_hat"] = safe(gcv.c_hat);
  j["b_range"] = {gcv.lower, gcv.upper};
  j["fallback"] = gcv.fallback;
  j["eta"] = eta;
  json sel = json::object();
  std::vector<std::string> warnings = gcv.warnings;
  if (mv) {
    for (TestKind t : kAllTests) {
      const auto& s = mv->selected[static_cast<std::size_t>(t)];
      sel[to_string(t)] = {{"m", s.m}, {"tau", s.tau}, {"volatility", safe(s.volatility)}};
    }
    warnings.insert(warnings.end(), mv->warnings.begin(), mv->warnings.end());
  }
  j["selected"] = sel;
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

}  // namespace lrd::io
