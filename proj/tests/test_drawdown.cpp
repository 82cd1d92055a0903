#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "mddkit/drawdown.hpp"

using mddkit::DrawdownReport;
using mddkit::SimConfig;

namespace {

// O(n^2) reference: for each t, the earliest running peak, with strict
// improvement so ties resolve to the earliest peak/trough pair.
DrawdownReport brute_force_mdd(const std::vector<double>& x) {
  DrawdownReport r;
  for (std::size_t t = 0; t < x.size(); ++t) {
    std::size_t peak = 0;
    for (std::size_t s = 1; s <= t; ++s)
      if (x[s] > x[peak]) peak = s;
    const double dd = x[peak] - x[t];
    if (dd > r.mdd) {
      r.mdd = dd;
      r.peak_index = peak;
      r.trough_index = t;
    }
  }
  return r;
}

std::vector<double> random_series(std::mt19937& gen, std::size_t len) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::normal_distribution<double> step(0.0, 1.0);
  std::vector<double> x(len);
  double level = 0.0;
  const int k = kind(gen);
  for (auto& v : x) {
    if (k == 0) level += step(gen);          // random walk
    else if (k == 1) level = step(gen);      // iid noise
    else level += std::abs(step(gen));       // nondecreasing
    v = level;
  }
  return x;
}

}  // namespace

TEST_CASE("max drawdown hand examples") {
  const std::vector<double> x{0.0, 1.0, 0.4, 0.8, 0.2};
  const auto r = mddkit::max_drawdown(x);
  CHECK(r.mdd == Catch::Approx(0.8));
  CHECK(r.peak_index == 1);
  CHECK(r.trough_index == 4);

  // Monotone climbs never draw down.
  const std::vector<double> up{0.0, 0.1, 0.2, 0.5};
  const auto ru = mddkit::max_drawdown(up);
  CHECK(ru.mdd == 0.0);
  CHECK(ru.peak_index == 0);
  CHECK(ru.trough_index == 0);

  // Ties resolve to the earliest peak and earliest trough.
  const std::vector<double> tie{1.0, 0.0, 1.0, 0.0};
  const auto rt = mddkit::max_drawdown(tie);
  CHECK(rt.mdd == Catch::Approx(1.0));
  CHECK(rt.peak_index == 0);
  CHECK(rt.trough_index == 1);

  CHECK(mddkit::max_drawdown(std::vector<double>{3.0}).mdd == 0.0);
  CHECK_THROWS_AS(mddkit::max_drawdown(std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("streaming scan equals brute force") {
  std::mt19937 gen(5150);
  std::uniform_int_distribution<std::size_t> len(1, 96);
  for (int trial = 0; trial < 400; ++trial) {
    const auto x = random_series(gen, len(gen));
    const auto fast = mddkit::max_drawdown(x);
    const auto slow = brute_force_mdd(x);
    REQUIRE(fast.mdd == slow.mdd);  // identical arithmetic, bitwise equal
    REQUIRE(fast.peak_index == slow.peak_index);
    REQUIRE(fast.trough_index == slow.trough_index);

    // Drawdown can never exceed the series range.
    double lo = x[0], hi = x[0];
    for (double v : x) { lo = std::min(lo, v); hi = std::max(hi, v); }
    CHECK(fast.mdd <= hi - lo + 1e-15);
  }
}

TEST_CASE("prefix drawdowns grow monotonically and match rescans") {
  std::mt19937 gen(99);
  const auto x = random_series(gen, 64);
  const auto prefix = mddkit::prefix_drawdowns(x);
  REQUIRE(prefix.size() == x.size());
  CHECK(prefix[0] == 0.0);
  for (std::size_t t = 1; t < x.size(); ++t) {
    CHECK(prefix[t] >= prefix[t - 1]);
    const std::vector<double> head(x.begin(), x.begin() + static_cast<long>(t) + 1);
    CHECK(prefix[t] == mddkit::max_drawdown(head).mdd);
  }
}

TEST_CASE("checkpoint cuts are ceiling-spaced") {
  CHECK(mddkit::checkpoint_indices(11, 6) ==
        std::vector<std::size_t>{2, 4, 6, 8, 10, 11});
  CHECK(mddkit::checkpoint_indices(6, 6) ==
        std::vector<std::size_t>{1, 2, 3, 4, 5, 6});
  CHECK(mddkit::checkpoint_indices(10, 1) == std::vector<std::size_t>{10});
  CHECK_THROWS_AS(mddkit::checkpoint_indices(10, 0), std::invalid_argument);
  CHECK_THROWS_AS(mddkit::checkpoint_indices(10, 11), std::invalid_argument);
}

TEST_CASE("checkpointed mdd on the sawtooth") {
  const std::vector<double> saw{0, 1, 0, 2, 0, 3, 0, 4, 0, 5, 0, 3};
  const auto cps = mddkit::mdd_checkpoints(saw, 6);
  REQUIRE(cps.size() == 6);
  const double want_mdd[] = {1, 2, 3, 4, 5, 5};
  const double want_t[] = {2, 4, 6, 8, 10, 11};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(cps[i].mdd == Catch::Approx(want_mdd[i]));
    CHECK(cps[i].t_days == Catch::Approx(want_t[i]));
  }

  // Last checkpoint always equals the full-series MDD.
  std::mt19937 gen(123);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_series(gen, 50);
    for (std::size_t k : {1u, 3u, 7u, 49u}) {
      const auto cp = mddkit::mdd_checkpoints(x, k);
      CHECK(cp.back().mdd == mddkit::max_drawdown(x).mdd);
    }
  }
}

TEST_CASE("emdd curve on zero-volatility drift is identically zero") {
  SimConfig cfg;
  cfg.mu_annual = 0.05;
  cfg.sigma_annual = 0.0;
  cfg.years = 0.25;
  cfg.replicates = 10;
  const auto curve = mddkit::estimate_emdd(cfg, 8);
  REQUIRE(curve.points.size() == 8);
  for (const auto& p : curve.points) {
    CHECK(p.emdd == 0.0);
    CHECK(p.std_error == 0.0);
  }
}

TEST_CASE("emdd curve metadata and dense default") {
  SimConfig cfg;
  cfg.hurst = 0.6;
  cfg.years = 0.125;
  cfg.replicates = 8;
  cfg.seed = 4;
  const auto curve = mddkit::estimate_emdd(cfg);
  CHECK(curve.hurst == 0.6);
  CHECK(curve.replicates == 8);
  REQUIRE(curve.points.size() == 32);  // every step
  for (std::size_t i = 0; i < curve.points.size(); ++i)
    CHECK(curve.points[i].t_days == Catch::Approx(static_cast<double>(i + 1)));
  // Ensemble means inherit prefix monotonicity.
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    CHECK(curve.points[i].emdd >= curve.points[i - 1].emdd);
}

TEST_CASE("emdd estimates are schedule independent") {
  SimConfig cfg;
  cfg.hurst = 0.7;
  cfg.mu_annual = 0.02;
  cfg.years = 0.5;
  cfg.replicates = 300;
  cfg.seed = 11;
  const auto a = mddkit::estimate_emdd(cfg, 6, 1);
  const auto b = mddkit::estimate_emdd(cfg, 6, 3);
  const auto c = mddkit::estimate_emdd(cfg, 6, 7);
  REQUIRE(a.points.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.points[i].emdd == b.points[i].emdd);  // bitwise
    CHECK(a.points[i].std_error == b.points[i].std_error);
    CHECK(a.points[i].emdd == c.points[i].emdd);
  }
}

TEST_CASE("emdd curve agrees with an ensemble recomputation") {
  SimConfig cfg;
  cfg.hurst = 0.55;
  cfg.mu_annual = -0.03;
  cfg.sigma_annual = 0.2;
  cfg.years = 0.25;
  cfg.replicates = 40;
  cfg.seed = 21;
  const auto curve = mddkit::estimate_emdd(cfg, 4);
  const auto paths = mddkit::generate_ensemble(cfg);
  const auto idx = mddkit::checkpoint_indices(64, 4);
  for (std::size_t j = 0; j < idx.size(); ++j) {
    double mean = 0.0;
    for (const auto& p : paths)
      mean += mddkit::prefix_drawdowns(p.values)[idx[j]];
    mean /= static_cast<double>(paths.size());
    CHECK(curve.points[j].emdd == Catch::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("driftless scaling behaves like sqrt t at h=0.5") {
  SimConfig cfg;
  cfg.sigma_annual = 0.05;
  cfg.years = 1.0;
  cfg.replicates = 3000;
  cfg.seed = 17;
  const auto curve = mddkit::estimate_emdd(cfg, 1);
  const double ratio = curve.points[0].emdd / (0.05 * std::sqrt(1.0));
  // Coarse-grid MC sits a few percent under the continuum constant 1.2533.
  CHECK(ratio > 1.10);
  CHECK(ratio < 1.30);
  CHECK(curve.points[0].std_error < 0.002);
}

TEST_CASE("exact self similarity across grids with shared noise") {
  // Same step count, same seed, horizons 1 vs 4 years: paths differ by the
  // exact factor 4^H, so MDDs do too — no Monte Carlo tolerance needed.
  const double h = 0.7;
  SimConfig base;
  base.hurst = h;
  base.sigma_annual = 0.3;
  base.years = 1.0;
  base.steps_per_year = 256;
  base.seed = 40;
  SimConfig wide = base;
  wide.years = 4.0;
  wide.steps_per_year = 64;

  for (std::uint64_t r = 0; r < 10; ++r) {
    const auto p1 = mddkit::generate_path(base, r);
    const auto p4 = mddkit::generate_path(wide, r);
    const double m1 = mddkit::max_drawdown(p1.values).mdd;
    const double m4 = mddkit::max_drawdown(p4.values).mdd;
    CHECK(m4 == Catch::Approx(std::pow(4.0, h) * m1).epsilon(1e-12));
  }
}
