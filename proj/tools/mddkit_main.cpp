// Command-line front end.  Every subcommand follows the same lifecycle:
// validate all parameters up front (before any simulation), compute, write a
// run manifest describing the invocation, then write the output files.  A
// failed run therefore leaves no files, and no output file ever exists
// without a manifest naming it.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mddkit/drawdown.hpp"
#include "mddkit/fbm.hpp"
#include "mddkit/io.hpp"
#include "mddkit/market.hpp"
#include "mddkit/metrics.hpp"
#include "mddkit/stats.hpp"
#include "mddkit/theory.hpp"
#include "mddkit/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// JSON configuration files
// ---------------------------------------------------------------------------

// Adapter so `--config file.json` feeds CLI11's normal config machinery.
// Top-level keys set global options; an object keyed by a subcommand name
// sets that subcommand's options.  Command-line flags override the file.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      j = json::parse(input);
    } catch (const json::parse_error& e) {
      throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::FileError("config root must be an object");
    std::vector<CLI::ConfigItem> items;
    flatten({}, j, items);
    return items;
  }

 private:
  static void flatten(const std::vector<std::string>& parents, const json& j,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        flatten(nested, value, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar_text(v));
      } else {
        item.inputs.push_back(scalar_text(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }
};

// ---------------------------------------------------------------------------
// Shared invocation state and the run manifest
// ---------------------------------------------------------------------------

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int threads = 0;  // 0 = all hardware threads

  fs::path out_path(const std::string& name) const {
    return fs::path(out_dir) / name;
  }
};

// Every invocation writes <subcommand>_manifest.json before its outputs.
// The manifest holds everything needed to reproduce the run: tool version,
// subcommand, seed, threading request, resolved parameters, and the input
// and output file names.  No timestamps, so reruns are byte-identical.
void write_manifest(const GlobalOptions& g, const std::string& subcommand,
                    json parameters, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  const json manifest{{"tool_version", mddkit::k_version},
                      {"subcommand", subcommand},
                      {"seed", g.seed},
                      {"threads", g.threads},
                      {"out_dir", g.out_dir},
                      {"parameters", std::move(parameters)},
                      {"inputs", inputs},
                      {"outputs", outputs}};
  const fs::path path = g.out_path(subcommand + "_manifest.json");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest.dump(2) << '\n';
}

std::string hurst_tag(double h) { return "H" + mddkit::io::format_double(h); }

void write_csv(const GlobalOptions& g, const std::string& name,
               const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
  const fs::path path = g.out_path(name);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// emdd: expected-maximum-drawdown curves over a Hurst grid
// ---------------------------------------------------------------------------

struct EmddArgs {
  std::vector<double> hurst{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double mu = 0.05;
  double sigma = 0.05;
  double years = 5.0;
  std::int64_t steps_per_year = 256;
  std::int64_t replicates = 1000;
  std::int64_t checkpoints = 0;  // 0 = every step
};

void run_emdd(const GlobalOptions& g, const EmddArgs& a) {
  if (a.hurst.empty()) throw std::invalid_argument("emdd: need at least one Hurst value");
  if (a.checkpoints < 0) throw std::invalid_argument("emdd: checkpoints must be >= 0");

  // Validate the whole grid before simulating any of it.
  std::vector<mddkit::SimConfig> configs;
  for (double h : a.hurst) {
    mddkit::SimConfig cfg;
    cfg.hurst = h;
    cfg.mu_annual = a.mu;
    cfg.sigma_annual = a.sigma;
    cfg.years = a.years;
    cfg.steps_per_year = a.steps_per_year;
    cfg.replicates = a.replicates;
    cfg.seed = g.seed;  // shared draws across H for clean cross-H contrasts
    cfg.validate();
    configs.push_back(cfg);
  }

  std::vector<mddkit::EmddCurve> curves;
  for (const auto& cfg : configs)
    curves.push_back(mddkit::estimate_emdd(
        cfg, static_cast<std::size_t>(a.checkpoints), g.threads));

  std::vector<std::string> outputs;
  for (double h : a.hurst) outputs.push_back("emdd_" + hurst_tag(h) + ".csv");

  write_manifest(g, "emdd",
                 {{"hurst", a.hurst},
                  {"mu_annual", a.mu},
                  {"sigma_annual", a.sigma},
                  {"years", a.years},
                  {"steps_per_year", a.steps_per_year},
                  {"replicates", a.replicates},
                  {"checkpoints", a.checkpoints}},
                 {}, outputs);
  for (std::size_t i = 0; i < curves.size(); ++i)
    mddkit::io::write_emdd_curve(curves[i], g.out_path(outputs[i]));
}

// ---------------------------------------------------------------------------
// ratios: drawdown-to-volatility and Calmar studies over Sharpe and time
// ---------------------------------------------------------------------------

struct RatioArgs {
  std::vector<double> hurst{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> sharpe{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  double sharpe_ref = 1.0;  // Sharpe held fixed for the Calmar-vs-time study
  double sigma = 0.05;
  double years = 5.0;
  std::int64_t steps_per_year = 256;
  std::int64_t replicates = 1000;
  std::int64_t time_points = 12;
  std::string qtable_prefix = "data/qtable";
};

mddkit::QTable load_positive_table(const std::string& prefix) {
  const fs::path csv = prefix + "_pos.csv";
  const fs::path meta = prefix + "_pos.json";
  for (const fs::path& p : {csv, meta})
    if (!fs::exists(p))
      throw std::runtime_error("calibration table " + p.string() +
                               " not found; run `mddkit qtable` to generate it");
  mddkit::QTable table = mddkit::io::load_qtable(csv, meta);
  if (table.kind() != mddkit::DriftSign::positive)
    throw std::runtime_error(csv.string() + ": expected a positive-drift table");
  return table;
}

void run_ratios(const GlobalOptions& g, const RatioArgs& a) {
  // This study covers profitable portfolios only: every requested Sharpe
  // ratio must be positive.
  for (double s : a.sharpe)
    if (!(s > 0.0))
      throw std::invalid_argument(
          "ratios: Sharpe values must be positive (drift mu <= 0 is out of scope)");
  if (!(a.sharpe_ref > 0.0))
    throw std::invalid_argument("ratios: sharpe-ref must be positive");
  if (a.sharpe.empty()) throw std::invalid_argument("ratios: need Sharpe values");
  if (a.hurst.empty()) throw std::invalid_argument("ratios: need Hurst values");
  if (a.time_points < 1)
    throw std::invalid_argument("ratios: time-points must be >= 1");

  const mddkit::QTable qpos = load_positive_table(a.qtable_prefix);

  std::vector<mddkit::SimConfig> probe;
  for (double h : a.hurst) {
    mddkit::SimConfig cfg;
    cfg.hurst = h;
    cfg.mu_annual = a.sharpe_ref * a.sigma;
    cfg.sigma_annual = a.sigma;
    cfg.years = a.years;
    cfg.steps_per_year = a.steps_per_year;
    cfg.replicates = a.replicates;
    cfg.seed = g.seed;
    cfg.validate();
    probe.push_back(cfg);
  }

  using Rows = std::vector<std::vector<std::string>>;
  const auto fmt = mddkit::io::format_double;

  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, Rows>> files;

  for (std::size_t hi = 0; hi < a.hurst.size(); ++hi) {
    const double h = a.hurst[hi];
    Rows ratio_rows, calmar_sharpe_rows;
    for (double s : a.sharpe) {
      mddkit::SimConfig cfg = probe[hi];
      cfg.mu_annual = s * a.sigma;
      const mddkit::EmddCurve c = mddkit::estimate_emdd(cfg, 1, g.threads);
      const double e = c.points.back().emdd;
      const double se = c.points.back().std_error;
      ratio_rows.push_back({fmt(s), fmt(e / a.sigma), fmt(se / a.sigma)});
      const double cal = cfg.mu_annual * a.years / e;
      calmar_sharpe_rows.push_back({fmt(s), fmt(cal), fmt(cal * se / e)});
    }

    const mddkit::EmddCurve ct = mddkit::estimate_emdd(
        probe[hi], static_cast<std::size_t>(a.time_points), g.threads);
    Rows calmar_time_rows;
    for (const mddkit::EmddPoint& p : ct.points) {
      const double t_years = p.t_days / mddkit::k_trading_days_per_year;
      const double cal = probe[hi].mu_annual * t_years / p.emdd;
      calmar_time_rows.push_back(
          {fmt(p.t_days), fmt(cal), fmt(cal * p.std_error / p.emdd)});
    }

    const std::string tag = hurst_tag(h);
    files.emplace_back("ratio_vs_sharpe_" + tag + ".csv", std::move(ratio_rows));
    files.emplace_back("calmar_vs_sharpe_" + tag + ".csv",
                       std::move(calmar_sharpe_rows));
    files.emplace_back("calmar_vs_time_" + tag + ".csv",
                       std::move(calmar_time_rows));
  }

  // Analytic overlay for the uncorrelated case, from the calibrated table.
  Rows ratio_bm, calmar_sharpe_bm, calmar_time_bm;
  for (double s : a.sharpe) {
    ratio_bm.push_back({fmt(s), fmt(mddkit::emdd_over_sigma(s, a.years, qpos))});
    calmar_sharpe_bm.push_back(
        {fmt(s), fmt(mddkit::calmar_from_sharpe(s, a.years, qpos))});
  }
  for (std::int64_t i = 1; i <= a.time_points; ++i) {
    const double t_days = std::ceil(
        static_cast<double>(i) *
        static_cast<double>(probe.front().step_count()) /
        static_cast<double>(a.time_points)) *
        probe.front().dt_days();
    const double t_years = t_days / mddkit::k_trading_days_per_year;
    calmar_time_bm.push_back(
        {fmt(t_days),
         fmt(mddkit::calmar_from_sharpe(a.sharpe_ref, t_years, qpos))});
  }
  files.emplace_back("ratio_vs_sharpe_bm.csv", std::move(ratio_bm));
  files.emplace_back("calmar_vs_sharpe_bm.csv", std::move(calmar_sharpe_bm));
  files.emplace_back("calmar_vs_time_bm.csv", std::move(calmar_time_bm));

  for (const auto& [name, rows] : files) outputs.push_back(name);
  write_manifest(g, "ratios",
                 {{"hurst", a.hurst},
                  {"sharpe", a.sharpe},
                  {"sharpe_ref", a.sharpe_ref},
                  {"sigma_annual", a.sigma},
                  {"years", a.years},
                  {"steps_per_year", a.steps_per_year},
                  {"replicates", a.replicates},
                  {"time_points", a.time_points},
                  {"qtable_prefix", a.qtable_prefix}},
                 {a.qtable_prefix + "_pos.csv", a.qtable_prefix + "_pos.json"},
                 outputs);

  for (const auto& [name, rows] : files) {
    const bool mc = name.find("_bm.csv") == std::string::npos;
    std::string header;
    if (name.rfind("ratio_vs_sharpe", 0) == 0)
      header = mc ? "sharpe,emdd_over_sigma,stderr" : "sharpe,emdd_over_sigma";
    else if (name.rfind("calmar_vs_sharpe", 0) == 0)
      header = mc ? "sharpe,calmar,stderr" : "sharpe,calmar";
    else
      header = mc ? "t_days,calmar,stderr" : "t_days,calmar";
    write_csv(g, name, header, rows);
  }
}

// ---------------------------------------------------------------------------
// qtable: calibrate the drawdown scaling function tables
// ---------------------------------------------------------------------------

struct QtableArgs {
  std::string kind = "both";  // positive | negative | both
  std::int64_t replicates = 10000;
};

void run_qtable(const GlobalOptions& g, const QtableArgs& a) {
  const bool want_pos = a.kind == "both" || a.kind == "positive";
  const bool want_neg = a.kind == "both" || a.kind == "negative";
  if (!want_pos && !want_neg)
    throw std::invalid_argument("qtable: kind must be positive, negative, or both");
  if (a.replicates < 2)
    throw std::invalid_argument("qtable: replicates must be >= 2");

  const std::vector<double> grid = mddkit::default_x_grid();
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, mddkit::QTable>> tables;

  if (want_pos) {
    tables.emplace_back("qtable_pos",
                        mddkit::calibrate_qtable(mddkit::DriftSign::positive,
                                                 grid, a.replicates,
                                                 mddkit::derive_seed(g.seed, 0),
                                                 g.threads));
    outputs.push_back("qtable_pos.csv");
    outputs.push_back("qtable_pos.json");
  }
  if (want_neg) {
    tables.emplace_back("qtable_neg",
                        mddkit::calibrate_qtable(mddkit::DriftSign::negative,
                                                 grid, a.replicates,
                                                 mddkit::derive_seed(g.seed, 1),
                                                 g.threads));
    outputs.push_back("qtable_neg.csv");
    outputs.push_back("qtable_neg.json");
  }

  write_manifest(g, "qtable",
                 {{"kind", a.kind},
                  {"replicates", a.replicates},
                  {"knots", grid.size()},
                  {"min_x", grid.front()},
                  {"max_x", grid.back()}},
                 {}, outputs);
  for (const auto& [stem, table] : tables) {
    mddkit::io::save_qtable(table, g.out_path(stem + ".csv"),
                            g.out_path(stem + ".json"));
    if (!table.meta().warning.empty())
      std::cerr << "warning: " << stem << ": " << table.meta().warning << '\n';
  }
}

// ---------------------------------------------------------------------------
// jb-scan: windowed normality test grid over a price series
// ---------------------------------------------------------------------------

struct JbArgs {
  std::string input;
  std::int64_t min_width = 256;
  double alpha = 0.05;
};

void run_jb_scan(const GlobalOptions& g, const JbArgs& a) {
  if (a.min_width < 8) throw std::invalid_argument("jb-scan: min-width must be >= 8");
  if (!(a.alpha > 0.0 && a.alpha < 1.0))
    throw std::invalid_argument("jb-scan: alpha must be in (0,1)");

  const mddkit::PriceSeries series = mddkit::load_price_csv(a.input);
  series.validate_format();
  std::vector<double> levels(series.size());
  for (std::size_t i = 0; i < levels.size(); ++i)
    levels[i] = std::log(series.closes[i]);

  const mddkit::JbGrid grid = mddkit::jb_scan(
      levels, static_cast<std::size_t>(a.min_width), a.alpha);

  const std::string out_name = series.name + "_jb.csv";
  write_manifest(g, "jb-scan",
                 {{"min_width", a.min_width}, {"alpha", a.alpha}}, {a.input},
                 {out_name});
  mddkit::io::write_jb_grid(grid, g.out_path(out_name));
}

// ---------------------------------------------------------------------------
// dfa: detrended fluctuation analysis of a price series' returns
// ---------------------------------------------------------------------------

struct DfaArgs {
  std::string input;
  std::int64_t box_min = 8;
  std::int64_t box_max = 0;  // 0 = n/4
  std::int64_t order = 1;
  std::int64_t n_sizes = 20;
};

void run_dfa(const GlobalOptions& g, const DfaArgs& a) {
  const mddkit::PriceSeries series = mddkit::load_price_csv(a.input);
  const std::vector<double> returns = mddkit::log_returns(series.closes);
  const std::size_t box_hi = a.box_max > 0 ? static_cast<std::size_t>(a.box_max)
                                           : returns.size() / 4;
  const mddkit::DfaResult result = mddkit::dfa_hurst(
      returns, static_cast<std::size_t>(a.box_min), box_hi,
      static_cast<int>(a.order), static_cast<std::size_t>(a.n_sizes));

  const std::string csv_name = series.name + "_dfa.csv";
  const std::string json_name = series.name + "_dfa.json";
  write_manifest(g, "dfa",
                 {{"box_min", a.box_min},
                  {"box_max", a.box_max},
                  {"order", a.order},
                  {"n_sizes", a.n_sizes}},
                 {a.input}, {csv_name, json_name});
  mddkit::io::write_dfa(result, g.out_path(csv_name), g.out_path(json_name));
}

// ---------------------------------------------------------------------------
// report: summary statistics for one or more price series
// ---------------------------------------------------------------------------

void run_report(const GlobalOptions& g, const std::vector<std::string>& inputs) {
  std::vector<mddkit::BubbleReport> reports;
  for (const std::string& path : inputs)
    reports.push_back(mddkit::bubble_report(mddkit::load_price_csv(path)));

  write_manifest(g, "report", json::object(), inputs, {"report.csv"});
  mddkit::io::append_report_csv(reports, g.out_path("report.csv"));
}

// ---------------------------------------------------------------------------
// compare: real drawdown trajectory vs matched synthetic ensembles
// ---------------------------------------------------------------------------

struct CompareArgs {
  std::vector<std::string> inputs;
  std::int64_t replicates = 1000;
};

void run_compare(const GlobalOptions& g, const CompareArgs& a) {
  std::vector<mddkit::ComparisonCurve> curves;
  std::vector<std::string> outputs;
  for (const std::string& path : a.inputs) {
    const mddkit::PriceSeries series = mddkit::load_price_csv(path);
    curves.push_back(mddkit::compare_real_vs_synthetic(series, a.replicates,
                                                       g.seed, g.threads));
    outputs.push_back(series.name + "_compare.csv");
  }

  write_manifest(g, "compare", {{"replicates", a.replicates}}, a.inputs,
                 outputs);
  for (std::size_t i = 0; i < curves.size(); ++i)
    mddkit::io::write_comparison_csv(curves[i], g.out_path(outputs[i]));
}

// ---------------------------------------------------------------------------
// fixture: synthetic price series generator
// ---------------------------------------------------------------------------

struct FixtureArgs {
  std::string name = "fixture";
  double mu = 0.001;
  double sigma = 0.01;
  double hurst = 0.5;
  std::int64_t days = 700;
  double start_price = 100.0;
  std::string start_date = "1994-01-03";
};

void run_fixture(const GlobalOptions& g, const FixtureArgs& a) {
  const mddkit::PriceSeries series = mddkit::synthetic_price_series(
      a.name, a.mu, a.sigma, a.hurst, a.days, g.seed, a.start_price,
      a.start_date);

  const std::string out_name = a.name + ".csv";
  write_manifest(g, "fixture",
                 {{"name", a.name},
                  {"mu_daily", a.mu},
                  {"sigma_daily", a.sigma},
                  {"hurst", a.hurst},
                  {"days", a.days},
                  {"start_price", a.start_price},
                  {"start_date", a.start_date}},
                 {}, {out_name});
  mddkit::io::write_price_csv(series, g.out_path(out_name));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drawdown risk analytics for fractional Brownian price models"};
  app.set_version_flag("--version", mddkit::k_version);
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Base RNG seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Output directory")
      ->envname("MDDKIT_OUT_DIR")
      ->capture_default_str();
  app.add_option("--threads", g.threads,
                 "Worker threads (0 = all hardware threads)")
      ->capture_default_str();

  EmddArgs emdd;
  CLI::App* c_emdd = app.add_subcommand(
      "emdd", "Expected maximum drawdown curves over a Hurst grid");
  c_emdd->add_option("--hurst", emdd.hurst, "Hurst exponents");
  c_emdd->add_option("--mu", emdd.mu, "Annual drift")->capture_default_str();
  c_emdd->add_option("--sigma", emdd.sigma, "Annual volatility")
      ->capture_default_str();
  c_emdd->add_option("--years", emdd.years, "Horizon in years")
      ->capture_default_str();
  c_emdd->add_option("--steps-per-year", emdd.steps_per_year, "Steps per year")
      ->capture_default_str();
  c_emdd->add_option("--replicates", emdd.replicates, "Ensemble size")
      ->capture_default_str();
  c_emdd->add_option("--checkpoints", emdd.checkpoints,
                     "Curve points (0 = every step)")
      ->capture_default_str();

  RatioArgs ratios;
  CLI::App* c_ratios = app.add_subcommand(
      "ratios", "Drawdown/volatility and Calmar studies vs Sharpe and time");
  c_ratios->add_option("--hurst", ratios.hurst, "Hurst exponents");
  c_ratios->add_option("--sharpe", ratios.sharpe, "Sharpe grid (positive)");
  c_ratios->add_option("--sharpe-ref", ratios.sharpe_ref,
                       "Sharpe for the Calmar-vs-time study")
      ->capture_default_str();
  c_ratios->add_option("--sigma", ratios.sigma, "Annual volatility")
      ->capture_default_str();
  c_ratios->add_option("--years", ratios.years, "Horizon in years")
      ->capture_default_str();
  c_ratios->add_option("--steps-per-year", ratios.steps_per_year,
                       "Steps per year")
      ->capture_default_str();
  c_ratios->add_option("--replicates", ratios.replicates, "Ensemble size")
      ->capture_default_str();
  c_ratios->add_option("--time-points", ratios.time_points,
                       "Checkpoints for the Calmar-vs-time study")
      ->capture_default_str();
  c_ratios->add_option("--qtable", ratios.qtable_prefix,
                       "Path prefix of the calibrated tables")
      ->capture_default_str();

  QtableArgs qtable;
  CLI::App* c_qtable = app.add_subcommand(
      "qtable", "Calibrate the drawdown scaling function tables");
  c_qtable->add_option("--kind", qtable.kind, "positive, negative, or both")
      ->capture_default_str();
  c_qtable->add_option("--replicates", qtable.replicates,
                       "Ensemble size per knot")
      ->capture_default_str();

  JbArgs jb;
  CLI::App* c_jb = app.add_subcommand(
      "jb-scan", "Windowed Jarque-Bera normality grid over a price series");
  c_jb->add_option("input", jb.input, "Price CSV (date,close)")->required();
  c_jb->add_option("--min-width", jb.min_width, "Smallest window, in days")
      ->capture_default_str();
  c_jb->add_option("--alpha", jb.alpha, "Test significance level")
      ->capture_default_str();

  DfaArgs dfa;
  CLI::App* c_dfa = app.add_subcommand(
      "dfa", "Detrended fluctuation analysis of a price series' returns");
  c_dfa->add_option("input", dfa.input, "Price CSV (date,close)")->required();
  c_dfa->add_option("--box-min", dfa.box_min, "Smallest box size")
      ->capture_default_str();
  c_dfa->add_option("--box-max", dfa.box_max, "Largest box size (0 = n/4)")
      ->capture_default_str();
  c_dfa->add_option("--order", dfa.order, "Detrending polynomial order")
      ->capture_default_str();
  c_dfa->add_option("--n-sizes", dfa.n_sizes, "Number of box sizes")
      ->capture_default_str();

  std::vector<std::string> report_inputs;
  CLI::App* c_report = app.add_subcommand(
      "report", "Summary statistics rows for one or more price series");
  c_report->add_option("inputs", report_inputs, "Price CSVs (date,close)")
      ->required();

  CompareArgs compare;
  CLI::App* c_compare = app.add_subcommand(
      "compare", "Real drawdown trajectory vs matched synthetic ensembles");
  c_compare->add_option("inputs", compare.inputs, "Price CSVs (date,close)")
      ->required();
  c_compare->add_option("--replicates", compare.replicates,
                        "Ensemble size per model")
      ->capture_default_str();

  FixtureArgs fixture;
  CLI::App* c_fixture =
      app.add_subcommand("fixture", "Generate a synthetic price series");
  c_fixture->add_option("--name", fixture.name, "Series and file name")
      ->capture_default_str();
  c_fixture->add_option("--mu", fixture.mu, "Daily drift")->capture_default_str();
  c_fixture->add_option("--sigma", fixture.sigma, "Daily volatility")
      ->capture_default_str();
  c_fixture->add_option("--hurst", fixture.hurst, "Hurst exponent")
      ->capture_default_str();
  c_fixture->add_option("--days", fixture.days, "Number of daily returns")
      ->capture_default_str();
  c_fixture->add_option("--start-price", fixture.start_price, "First close")
      ->capture_default_str();
  c_fixture->add_option("--start-date", fixture.start_date,
                        "First date (rolls forward to a weekday)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (c_emdd->parsed()) run_emdd(g, emdd);
    if (c_ratios->parsed()) run_ratios(g, ratios);
    if (c_qtable->parsed()) run_qtable(g, qtable);
    if (c_jb->parsed()) run_jb_scan(g, jb);
    if (c_dfa->parsed()) run_dfa(g, dfa);
    if (c_report->parsed()) run_report(g, report_inputs);
    if (c_compare->parsed()) run_compare(g, compare);
    if (c_fixture->parsed()) run_fixture(g, fixture);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
