#pragma once

// Price-series ingestion and the end-to-end analyses that run on them: the
// per-series summary report (daily return moments, Sharpe, DFA Hurst, maximum
// drawdown of the log series, Calmar) and the comparison of a real
// trajectory's checkpointed MDD against matched synthetic ensembles.
// Everything in this module works in daily units: one row is one trading day
// and no annualization is applied.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mddkit/drawdown.hpp"
#include "mddkit/fbm.hpp"
#include "mddkit/stats.hpp"

namespace mddkit {

namespace detail {

// Gregorian calendar <-> serial day count (civil-days algorithm; day 0 is
// 1970-01-01, a Thursday).
inline long days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<long>(era) * 146097 + static_cast<long>(doe) - 719468;
}

inline void civil_from_days(long z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long yr = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yr) + (m <= 2);
}

inline bool is_leap(int y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline unsigned days_in_month(int y, unsigned m) {
  static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30,
                                         31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return lengths[m - 1];
}

}  // namespace detail

// Parses a strict ISO `YYYY-MM-DD` calendar date to its serial day number.
inline long parse_iso_date(const std::string& s) {
  const auto bad = [&] {
    throw std::runtime_error("invalid ISO date '" + s + "'");
  };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') bad();
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (s[i] < '0' || s[i] > '9') bad();
  const int y = std::stoi(s.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  if (m < 1 || m > 12 || d < 1 || d > detail::days_in_month(y, m)) bad();
  return detail::days_from_civil(y, m, d);
}

inline std::string format_iso_date(long serial) {
  int y;
  unsigned m, d;
  detail::civil_from_days(serial, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
  return buf;
}

// 0 = Sunday .. 6 = Saturday.
inline int day_of_week(long serial) {
  return static_cast<int>(((serial % 7) + 11) % 7);
}

// ---------------------------------------------------------------------------
// Price series
// ---------------------------------------------------------------------------

struct PriceSeries {
  std::string name;
  std::vector<std::string> dates;  // ISO YYYY-MM-DD, strictly increasing
  std::vector<double> closes;      // positive

  std::size_t size() const { return closes.size(); }

  // Structural invariants any loaded series satisfies.
  void validate_format() const {
    if (dates.size() != closes.size())
      throw std::invalid_argument("price series: dates/closes length mismatch");
    if (closes.empty()) throw std::invalid_argument("price series: empty");
    long prev = 0;
    for (std::size_t i = 0; i < dates.size(); ++i) {
      const long serial = parse_iso_date(dates[i]);
      if (i > 0 && serial <= prev)
        throw std::invalid_argument("price series: dates not strictly increasing at row " +
                                    std::to_string(i + 2));
      prev = serial;
      if (!(closes[i] > 0.0) || !std::isfinite(closes[i]))
        throw std::invalid_argument("price series: non-positive close at row " +
                                    std::to_string(i + 2));
    }
  }

  // Full invariants required by the analyses: at least 257 closes, i.e. at
  // least 256 daily returns.
  void validate() const {
    validate_format();
    if (size() < 257)
      throw std::invalid_argument("price series '" + name +
                                  "': need >= 257 rows (256 returns), have " +
                                  std::to_string(size()));
  }
};

// Loads a `date,close` CSV.  Structural validation only — short fixtures are
// loadable; the analyses enforce their own minimum length.  Error messages
// cite 1-based file rows (the header is row 1).
inline PriceSeries load_price_csv(const std::filesystem::path& path,
                                  std::string name = "") {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  PriceSeries series;
  series.name = name.empty() ? path.stem().string() : std::move(name);

  const auto fail = [&](std::size_t row, const std::string& what) {
    throw std::runtime_error(path.string() + " row " + std::to_string(row) +
                             ": " + what);
  };

  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "date,close") fail(row, "expected header 'date,close'");
      header_seen = true;
      continue;
    }
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) fail(row, "expected two comma-separated fields");
    if (line.find(',', comma + 1) != std::string::npos)
      fail(row, "expected exactly two fields");
    const std::string date = line.substr(0, comma);
    const std::string close_text = line.substr(comma + 1);
    if (close_text.empty()) fail(row, "missing close");

    long serial = 0;
    try {
      serial = parse_iso_date(date);
    } catch (const std::exception& e) {
      fail(row, e.what());
    }
    if (!series.dates.empty() && serial <= parse_iso_date(series.dates.back()))
      fail(row, "dates must be strictly increasing");

    char* end = nullptr;
    const double close = std::strtod(close_text.c_str(), &end);
    if (end != close_text.c_str() + close_text.size())
      fail(row, "malformed close '" + close_text + "'");
    if (!(close > 0.0) || !std::isfinite(close))
      fail(row, "close must be positive, got '" + close_text + "'");

    series.dates.push_back(date);
    series.closes.push_back(close);
  }
  if (series.closes.empty())
    throw std::runtime_error(path.string() + ": no data rows");
  return series;
}

// ---------------------------------------------------------------------------
// Per-series summary report
// ---------------------------------------------------------------------------

struct BubbleReport {
  std::string name;
  std::int64_t n_days = 0;  // number of daily returns
  double mu_daily = 0.0;
  double sigma_daily = 0.0;       // sample standard deviation
  double sharpe = 0.0;            // mu_daily / sigma_daily
  double hurst_dfa = 0.0;         // NaN if the estimate is unavailable
  double mdd = 0.0;               // of the log-price series
  std::optional<double> calmar;   // empty when mdd == 0
};

inline BubbleReport bubble_report(const PriceSeries& series) {
  series.validate();
  std::vector<double> y(series.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::log(series.closes[i]);
  const std::vector<double> r = log_returns(series.closes);

  BubbleReport rep;
  rep.name = series.name;
  rep.n_days = static_cast<std::int64_t>(r.size());

  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(r.size());
  double ss = 0.0;
  for (double v : r) ss += (v - mean) * (v - mean);
  rep.mu_daily = mean;
  rep.sigma_daily = std::sqrt(ss / static_cast<double>(r.size() - 1));
  rep.sharpe = rep.sigma_daily > 0.0 ? rep.mu_daily / rep.sigma_daily
                                     : std::nan("");

  const DfaResult dfa = dfa_hurst(r);
  rep.hurst_dfa = dfa.degenerate ? std::nan("") : dfa.hurst_estimate;

  rep.mdd = max_drawdown(y).mdd;
  if (rep.mdd > 0.0)
    rep.calmar = rep.mu_daily * static_cast<double>(rep.n_days) / rep.mdd;
  return rep;
}

// ---------------------------------------------------------------------------
// Real vs synthetic checkpoint comparison
// ---------------------------------------------------------------------------

struct ComparisonPoint {
  double t_days = 0.0;
  double real_mdd = 0.0;
  double emdd_bm = 0.0;
  double stderr_bm = 0.0;
  double emdd_fbm = 0.0;
  double stderr_fbm = 0.0;
};

struct ComparisonCurve {
  std::string name;
  double hurst_used = 0.5;  // DFA estimate, clamped to the simulable range
  std::int64_t replicates = 0;
  std::vector<ComparisonPoint> checkpoints;  // six of them
};

inline constexpr std::size_t k_comparison_checkpoints = 6;

// Checkpointed MDD of the real log series next to E(MDD) of two matched
// ensembles: plain Bm (H = 0.5) and fBm at the series' DFA exponent, both
// with the measured daily mu and sigma, the same length, and per-step
// increment deviation equal to sigma (dt = one day).
inline ComparisonCurve compare_real_vs_synthetic(const PriceSeries& series,
                                                 std::int64_t replicates = 1000,
                                                 std::uint64_t seed = 0,
                                                 int threads = 0) {
  const BubbleReport rep = bubble_report(series);
  if (!std::isfinite(rep.hurst_dfa))
    throw std::domain_error("comparison: series has no usable Hurst estimate");
  if (replicates < 2)
    throw std::invalid_argument("comparison: need >= 2 replicates");

  std::vector<double> y(series.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::log(series.closes[i]);

  const std::size_t n = y.size() - 1;
  const std::vector<Checkpoint> real =
      mdd_checkpoints(y, k_comparison_checkpoints, 1.0);

  ComparisonCurve curve;
  curve.name = rep.name;
  curve.replicates = replicates;
  curve.hurst_used = std::clamp(rep.hurst_dfa, 0.05, 0.95);

  // One model day per step: steps_per_year = 1 with years = n makes the
  // per-step drift mu_daily and the per-step deviation sigma_daily * 1^H.
  SimConfig base;
  base.mu_annual = rep.mu_daily;
  base.sigma_annual = rep.sigma_daily;
  base.years = static_cast<double>(n);
  base.steps_per_year = 1;
  base.replicates = replicates;

  SimConfig bm = base;
  bm.hurst = 0.5;
  bm.seed = derive_seed(seed, 0);
  SimConfig fbm = base;
  fbm.hurst = curve.hurst_used;
  fbm.seed = derive_seed(seed, 1);

  const EmddCurve e_bm = estimate_emdd(bm, k_comparison_checkpoints, threads);
  const EmddCurve e_fbm = estimate_emdd(fbm, k_comparison_checkpoints, threads);

  curve.checkpoints.resize(k_comparison_checkpoints);
  for (std::size_t i = 0; i < k_comparison_checkpoints; ++i) {
    ComparisonPoint& p = curve.checkpoints[i];
    p.t_days = real[i].t_days;  // cut index in days
    p.real_mdd = real[i].mdd;
    p.emdd_bm = e_bm.points[i].emdd;
    p.stderr_bm = e_bm.points[i].std_error;
    p.emdd_fbm = e_fbm.points[i].emdd;
    p.stderr_fbm = e_fbm.points[i].std_error;
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Synthetic fixtures
// ---------------------------------------------------------------------------

// Generates a synthetic price series from the log-price model in daily
// units: closes = start_price * exp(path), dated on consecutive weekdays.
// sigma_daily = 0 produces exact exponential growth.
inline PriceSeries synthetic_price_series(const std::string& name,
                                          double mu_daily, double sigma_daily,
                                          double hurst, std::int64_t n_days,
                                          std::uint64_t seed,
                                          double start_price = 100.0,
                                          const std::string& start_date = "1994-01-03") {
  if (n_days < 1) throw std::invalid_argument("fixture: n_days must be >= 1");
  if (!(start_price > 0.0))
    throw std::invalid_argument("fixture: start_price must be > 0");

  SimConfig cfg;
  cfg.hurst = hurst;
  cfg.mu_annual = mu_daily;
  cfg.sigma_annual = sigma_daily;
  cfg.years = static_cast<double>(n_days);
  cfg.steps_per_year = 1;
  cfg.seed = seed;
  const Path path = generate_path(cfg, 0);

  PriceSeries series;
  series.name = name;
  series.dates.reserve(path.values.size());
  series.closes.reserve(path.values.size());
  long serial = parse_iso_date(start_date);
  for (double v : path.values) {
    while (day_of_week(serial) == 0 || day_of_week(serial) == 6) ++serial;
    series.dates.push_back(format_iso_date(serial));
    series.closes.push_back(start_price * std::exp(v));
    ++serial;
  }
  return series;
}

}  // namespace mddkit
