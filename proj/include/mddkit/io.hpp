#pragma once

// File formats.  CSV for anything tabular, JSON for configuration echoes and
// metadata.  All floating-point output uses shortest round-trip formatting,
// so files written on one run parse back bitwise identical.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mddkit/drawdown.hpp"
#include "mddkit/fbm.hpp"
#include "mddkit/market.hpp"
#include "mddkit/stats.hpp"
#include "mddkit/theory.hpp"

namespace mddkit::io {

// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw std::runtime_error("malformed number '" + s + "'");
  return v;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path,
                              std::ios_base::openmode mode = std::ios_base::out) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

// Reads a CSV into header + rows, tolerating trailing carriage returns and a
// trailing newline.
struct CsvFile {
  std::string header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvFile read_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  CsvFile csv;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      csv.header = line;
      first = false;
    } else {
      csv.rows.push_back(split_csv_line(line));
    }
  }
  if (first) throw std::runtime_error(path.string() + ": empty file");
  return csv;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Simulation config
// ---------------------------------------------------------------------------

inline nlohmann::json config_to_json(const SimConfig& cfg) {
  return {{"hurst", cfg.hurst},
          {"mu_annual", cfg.mu_annual},
          {"sigma_annual", cfg.sigma_annual},
          {"years", cfg.years},
          {"steps_per_year", cfg.steps_per_year},
          {"replicates", cfg.replicates},
          {"seed", cfg.seed}};
}

inline SimConfig config_from_json(const nlohmann::json& j) {
  SimConfig cfg;
  cfg.hurst = j.at("hurst").get<double>();
  cfg.mu_annual = j.at("mu_annual").get<double>();
  cfg.sigma_annual = j.at("sigma_annual").get<double>();
  cfg.years = j.at("years").get<double>();
  cfg.steps_per_year = j.at("steps_per_year").get<std::int64_t>();
  cfg.replicates = j.at("replicates").get<std::int64_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

// ---------------------------------------------------------------------------
// Path ensembles
// ---------------------------------------------------------------------------

// One row per path, columns t_0..t_n; the generating config is echoed as
// JSON next to the CSV.
inline void write_ensemble(const std::vector<Path>& paths, const SimConfig& cfg,
                           const std::filesystem::path& csv_path,
                           const std::filesystem::path& json_path) {
  if (paths.empty()) throw std::invalid_argument("write_ensemble: no paths");
  auto out = detail::open_out(csv_path);
  const std::size_t cols = paths.front().values.size();
  for (std::size_t j = 0; j < cols; ++j)
    out << (j ? "," : "") << "t_" << j;
  out << '\n';
  for (const Path& p : paths) {
    if (p.values.size() != cols)
      throw std::invalid_argument("write_ensemble: ragged paths");
    for (std::size_t j = 0; j < cols; ++j)
      out << (j ? "," : "") << format_double(p.values[j]);
    out << '\n';
  }
  auto meta = detail::open_out(json_path);
  meta << config_to_json(cfg).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// E(MDD) curves
// ---------------------------------------------------------------------------

inline void write_emdd_curve(const EmddCurve& curve,
                             const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "hurst,t_days,emdd,stderr,replicates\n";
  for (const EmddPoint& p : curve.points)
    out << format_double(curve.hurst) << ',' << format_double(p.t_days) << ','
        << format_double(p.emdd) << ',' << format_double(p.std_error) << ','
        << curve.replicates << '\n';
}

// ---------------------------------------------------------------------------
// Q tables
// ---------------------------------------------------------------------------

inline void save_qtable(const QTable& table, const std::filesystem::path& csv_path,
                        const std::filesystem::path& json_path) {
  auto out = detail::open_out(csv_path);
  out << "x,Q\n";
  const std::vector<double>& xs = table.knots_x();
  const std::vector<double>& qs = table.knots_q();
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << format_double(xs[i]) << ',' << format_double(qs[i]) << '\n';

  const QTableMeta& m = table.meta();
  nlohmann::json j{{"kind", table.kind() == DriftSign::positive ? "positive"
                                                                : "negative"},
                   {"knots", xs.size()},
                   {"replicates", m.replicates},
                   {"seed", m.seed},
                   {"created", m.created},
                   {"steps_rule", m.steps_rule}};
  if (!m.warning.empty()) j["warning"] = m.warning;
  auto meta = detail::open_out(json_path);
  meta << j.dump(2) << '\n';
}

inline QTable load_qtable(const std::filesystem::path& csv_path,
                          const std::filesystem::path& json_path) {
  const auto csv = detail::read_csv(csv_path);
  if (csv.header != "x,Q")
    throw std::runtime_error(csv_path.string() + ": expected header 'x,Q'");
  std::vector<double> xs, qs;
  for (const auto& row : csv.rows) {
    if (row.size() != 2)
      throw std::runtime_error(csv_path.string() + ": expected two columns");
    xs.push_back(parse_double(row[0]));
    qs.push_back(parse_double(row[1]));
  }

  auto in = detail::open_in(json_path);
  const nlohmann::json j = nlohmann::json::parse(in);
  const std::string kind_name = j.at("kind").get<std::string>();
  DriftSign kind;
  if (kind_name == "positive")
    kind = DriftSign::positive;
  else if (kind_name == "negative")
    kind = DriftSign::negative;
  else
    throw std::runtime_error(json_path.string() + ": unknown kind '" +
                             kind_name + "'");
  QTableMeta meta;
  meta.replicates = j.at("replicates").get<std::int64_t>();
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.created = j.at("created").get<std::string>();
  meta.steps_rule = j.at("steps_rule").get<std::string>();
  if (j.contains("warning")) meta.warning = j.at("warning").get<std::string>();
  return QTable(kind, std::move(xs), std::move(qs), std::move(meta));
}

// ---------------------------------------------------------------------------
// Normality scan grids
// ---------------------------------------------------------------------------

// Triplet format: window start k, window width j >= min_width, outcome.
inline void write_jb_grid(const JbGrid& grid, const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "k,j,outcome\n";
  for (std::size_t k = 0; k < grid.rows(); ++k)
    for (std::size_t j = grid.min_width(); j + k <= grid.n_increments(); ++j)
      out << k << ',' << j << ',' << static_cast<int>(grid.outcome(k, j))
          << '\n';
}

// ---------------------------------------------------------------------------
// Detrended fluctuation results
// ---------------------------------------------------------------------------

inline void write_dfa(const DfaResult& result, const std::filesystem::path& csv_path,
                      const std::filesystem::path& json_path) {
  auto out = detail::open_out(csv_path);
  out << "box_size,fluctuation\n";
  for (std::size_t i = 0; i < result.box_sizes.size(); ++i)
    out << result.box_sizes[i] << ',' << format_double(result.fluctuations[i])
        << '\n';

  const nlohmann::json j{{"hurst_estimate", result.hurst_estimate},
                         {"fit_r2", result.fit_r2},
                         {"n_box_sizes", result.box_sizes.size()},
                         {"degenerate", result.degenerate}};
  auto meta = detail::open_out(json_path);
  meta << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Price series and reports
// ---------------------------------------------------------------------------

inline void write_price_csv(const PriceSeries& series,
                            const std::filesystem::path& path) {
  if (series.dates.size() != series.closes.size())
    throw std::invalid_argument("write_price_csv: dates/closes mismatch");
  auto out = detail::open_out(path);
  out << "date,close\n";
  for (std::size_t i = 0; i < series.closes.size(); ++i)
    out << series.dates[i] << ',' << format_double(series.closes[i]) << '\n';
}

inline constexpr const char* k_report_header =
    "name,n_days,mu_daily,sigma_daily,sharpe,hurst_dfa,mdd,calmar";

// Appends report rows, writing the header only when the file is new or
// empty, so successive runs accumulate into one table.
inline void append_report_csv(const std::vector<BubbleReport>& reports,
                              const std::filesystem::path& path) {
  const bool fresh =
      !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  auto out = detail::open_out(path, std::ios_base::app);
  if (fresh) out << k_report_header << '\n';
  for (const BubbleReport& r : reports) {
    out << r.name << ',' << r.n_days << ',' << format_double(r.mu_daily) << ','
        << format_double(r.sigma_daily) << ',' << format_double(r.sharpe)
        << ',' << format_double(r.hurst_dfa) << ',' << format_double(r.mdd)
        << ','
        << (r.calmar ? format_double(*r.calmar) : std::string("nan")) << '\n';
  }
}

inline void write_comparison_csv(const ComparisonCurve& curve,
                                 const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << "name,t_days,real_mdd,emdd_bm,stderr_bm,emdd_fbm,stderr_fbm\n";
  for (const ComparisonPoint& p : curve.checkpoints)
    out << curve.name << ',' << format_double(p.t_days) << ','
        << format_double(p.real_mdd) << ',' << format_double(p.emdd_bm) << ','
        << format_double(p.stderr_bm) << ',' << format_double(p.emdd_fbm)
        << ',' << format_double(p.stderr_fbm) << '\n';
}

}  // namespace mddkit::io
