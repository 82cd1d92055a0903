#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mddkit/drawdown.hpp"
#include "mddkit/theory.hpp"

using mddkit::DriftSign;
using mddkit::EmddBranch;
using mddkit::EmddMethod;
using mddkit::QTable;

namespace {

// Shared mini-tables: coarse grids, calibrated once per test run.
const QTable& mini_pos() {
  static const QTable t = mddkit::calibrate_qtable(
      DriftSign::positive, {0.02, 0.1, 0.3, 0.8, 1.5, 3.0, 6.0}, 3000, 505);
  return t;
}

const QTable& mini_neg() {
  static const QTable t = mddkit::calibrate_qtable(
      DriftSign::negative, {0.02, 0.1, 0.5, 2.0, 6.0}, 2000, 506);
  return t;
}

}  // namespace

TEST_CASE("qtable construction validates knots") {
  CHECK_THROWS_AS(QTable(DriftSign::positive, {1.0}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(QTable(DriftSign::positive, {1.0, 0.5}, {0.3, 0.5}),
                  std::invalid_argument);  // x not increasing
  CHECK_THROWS_AS(QTable(DriftSign::positive, {0.5, 1.0}, {0.5, 0.3}),
                  std::invalid_argument);  // q decreasing
  CHECK_THROWS_AS(QTable(DriftSign::positive, {-1.0, 1.0}, {0.1, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(QTable(DriftSign::positive, {0.5, 1.0}, {0.3}),
                  std::invalid_argument);
  CHECK_NOTHROW(QTable(DriftSign::positive, {0.5, 1.0}, {0.3, 0.5}));
}

TEST_CASE("qtable interpolation hits knots and stays monotone") {
  const QTable t(DriftSign::positive, {0.1, 0.4, 1.0, 4.0, 10.0},
                 {0.26, 0.48, 0.70, 1.05, 1.30});
  for (std::size_t i = 0; i < t.knots_x().size(); ++i)
    CHECK(t.q(t.knots_x()[i]) == Catch::Approx(t.knots_q()[i]).margin(1e-12));

  double prev = 0.0;
  for (double lx = std::log(0.01); lx < std::log(40.0); lx += 0.01) {
    const double v = t.q(std::exp(lx));
    CHECK(v >= prev - 1e-12);
    prev = v;
  }

  CHECK_THROWS_AS(t.q(0.0), std::domain_error);
  CHECK_THROWS_AS(t.q(-2.0), std::domain_error);
}

TEST_CASE("qtable tails follow the limiting laws") {
  const double c = mddkit::k_small_x_coeff;
  const QTable pos(DriftSign::positive, {0.2, 1.0, 8.0}, {0.37, 0.72, 1.22});
  // Below the grid: two-term small-x law anchored at the first knot.
  const double want_small =
      0.37 * (c * std::sqrt(0.05) - 0.025) / (c * std::sqrt(0.2) - 0.1);
  CHECK(pos.q(0.05) == Catch::Approx(want_small).margin(1e-12));
  // Above the grid: log growth with the exact limiting slope 1/4.
  CHECK(pos.q(32.0) == Catch::Approx(1.22 + 0.25 * std::log(32.0 / 8.0)).margin(1e-12));
  // Continuity at both handoffs.
  CHECK(pos.q(0.2 * (1 - 1e-9)) == Catch::Approx(pos.q(0.2 * (1 + 1e-9))).epsilon(1e-6));
  CHECK(pos.q(8.0 * (1 - 1e-9)) == Catch::Approx(pos.q(8.0 * (1 + 1e-9))).epsilon(1e-6));

  // First knot beyond the two-term form's monotone range: pure sqrt anchor.
  const QTable far(DriftSign::positive, {1.0, 8.0}, {0.72, 1.22});
  CHECK(far.q(0.25) == Catch::Approx(0.72 * 0.5).margin(1e-12));

  const QTable neg(DriftSign::negative, {0.2, 1.0, 8.0}, {0.40, 1.10, 8.40});
  const double want_neg =
      0.40 * (c * std::sqrt(0.05) + 0.025) / (c * std::sqrt(0.2) + 0.1);
  CHECK(neg.q(0.05) == Catch::Approx(want_neg).margin(1e-12));
  CHECK(neg.q(10.5) == Catch::Approx(8.40 + 2.5).margin(1e-12));  // unit slope
}

TEST_CASE("calibration is deterministic and schedule independent") {
  const std::vector<double> grid{0.5, 2.0};
  const QTable a = mddkit::calibrate_qtable(DriftSign::positive, grid, 400, 99, 1);
  const QTable b = mddkit::calibrate_qtable(DriftSign::positive, grid, 400, 99, 3);
  REQUIRE(a.knots_q().size() == 2);
  CHECK(a.knots_q()[0] == b.knots_q()[0]);  // bitwise
  CHECK(a.knots_q()[1] == b.knots_q()[1]);

  const QTable c = mddkit::calibrate_qtable(DriftSign::positive, grid, 400, 100, 1);
  CHECK(a.knots_q()[0] != c.knots_q()[0]);

  CHECK(a.meta().replicates == 400);
  CHECK(a.meta().seed == 99);
  CHECK_FALSE(a.meta().created.empty());
}

TEST_CASE("calibration warns when precision target is missed") {
  const QTable noisy =
      mddkit::calibrate_qtable(DriftSign::positive, {0.3, 1.0}, 50, 7);
  CHECK_FALSE(noisy.meta().warning.empty());

  const QTable& good = mini_pos();
  CHECK(good.meta().warning.empty());
}

TEST_CASE("calibration rejects bad inputs") {
  CHECK_THROWS_AS(mddkit::calibrate_qtable(DriftSign::positive, {1.0}, 100, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(mddkit::calibrate_qtable(DriftSign::positive, {1.0, 0.5}, 100, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(mddkit::calibrate_qtable(DriftSign::positive, {0.5, 1.0}, 1, 0),
                  std::invalid_argument);
}

TEST_CASE("zero drift closed form") {
  const auto e = mddkit::emdd_bm(0.0, 0.05, 1.0, mini_pos());
  CHECK(e.branch == EmddBranch::zero_drift);
  CHECK(e.method == EmddMethod::closed_form);
  CHECK(e.value == Catch::Approx(0.06266570686577501).margin(1e-15));
  CHECK(mddkit::k_driftless_mdd_coeff == Catch::Approx(std::sqrt(std::acos(-1.0) / 2.0)).margin(1e-15));
}

TEST_CASE("drifted branches select the right table and method") {
  const auto pos = mddkit::emdd_bm(0.05, 0.05, 2.0, mini_pos());
  CHECK(pos.branch == EmddBranch::positive_drift);
  CHECK(pos.method == EmddMethod::table);  // x = 1 inside the grid

  const auto far = mddkit::emdd_bm(0.5, 0.05, 2.0, mini_pos());
  CHECK(far.method == EmddMethod::asymptotic);  // x = 100 beyond the grid

  const auto neg = mddkit::emdd_bm(-0.05, 0.05, 2.0, mini_pos(), mini_neg());
  CHECK(neg.branch == EmddBranch::negative_drift);

  CHECK_THROWS_AS(mddkit::emdd_bm(-0.05, 0.05, 2.0, mini_pos()),
                  std::invalid_argument);  // wrong table kind
  CHECK_THROWS_AS(mddkit::emdd_bm(0.05, 0.0, 2.0, mini_pos()),
                  std::invalid_argument);
  CHECK_THROWS_AS(mddkit::emdd_bm(0.05, 0.05, 0.0, mini_pos()),
                  std::invalid_argument);
}

TEST_CASE("emdd is continuous as drift vanishes") {
  const double sigma = 0.05, years = 1.0;
  const double zero = mddkit::emdd_bm(0.0, sigma, years, mini_pos()).value;
  const double near_pos = mddkit::emdd_bm(1e-7, sigma, years, mini_pos()).value;
  const double near_neg =
      mddkit::emdd_bm(-1e-7, sigma, years, mini_pos(), mini_neg()).value;
  // The sqrt tail reproduces the zero-drift constant up to the first knot's
  // Monte Carlo error (calibrated to ~1%).
  CHECK(near_pos == Catch::Approx(zero).epsilon(0.03));
  CHECK(near_neg == Catch::Approx(zero).epsilon(0.03));
}

TEST_CASE("emdd is continuous at the table-to-asymptote handoff") {
  const double sigma = 0.05, years = 2.0;
  // x = max knot exactly at mu = sigma * sqrt(2 * max_x / years).
  const double mu_at = sigma * std::sqrt(2.0 * mini_pos().max_x() / years);
  const double below = mddkit::emdd_bm(mu_at * (1 - 1e-9), sigma, years, mini_pos()).value;
  const double above = mddkit::emdd_bm(mu_at * (1 + 1e-9), sigma, years, mini_pos()).value;
  CHECK(below == Catch::Approx(above).epsilon(1e-6));
}

TEST_CASE("table prediction matches a fresh simulation oracle") {
  // Independent cross-check: the tabulated prediction against a direct
  // ensemble estimate produced by the path-simulation stack (different code
  // path, different discretization, fresh seed).
  mddkit::SimConfig cfg;
  cfg.hurst = 0.5;
  cfg.mu_annual = 0.3;
  cfg.sigma_annual = 0.3;
  cfg.years = 2.0;  // x = 1
  cfg.steps_per_year = 4096;
  cfg.replicates = 3000;
  cfg.seed = 31337;
  const auto curve = mddkit::estimate_emdd(cfg, 1);
  const double oracle = curve.points[0].emdd;
  const double oracle_se = curve.points[0].std_error;

  const double pred = mddkit::emdd_bm(0.3, 0.3, 2.0, mini_pos()).value;
  // Knot uncertainty: relative sd of a single-path MDD is below 0.45, so the
  // mean over R replicates carries rel. stderr <= 0.45/sqrt(R).
  const double pred_se = pred * 0.45 / std::sqrt(3000.0);
  const double gap = std::abs(pred - oracle);
  INFO("pred " << pred << " oracle " << oracle << " +- " << oracle_se);
  CHECK(gap < 3.0 * std::hypot(pred_se, oracle_se) + 0.005 * pred);
}

TEST_CASE("negative drift expectation exceeds the pure loss line") {
  // E[MDD] >= |mu| T for downward drift: the drawdown contains the full loss.
  const double sigma = 0.1, years = 3.0;
  for (double mu : {-0.05, -0.2, -0.5}) {
    const double e = mddkit::emdd_bm(mu, sigma, years, mini_pos(), mini_neg()).value;
    CHECK(e > std::abs(mu) * years);
  }
}

TEST_CASE("asymptotic forms: frozen spot values") {
  CHECK(mddkit::emdd_bm_asymptotic(0.0, 0.05, 1.0) ==
        Catch::Approx(0.06266570686577501).margin(1e-15));
  CHECK(mddkit::emdd_bm_asymptotic(0.05, 0.05, 5.0) ==
        Catch::Approx(0.07199501894738947).margin(1e-12));
  CHECK(mddkit::emdd_bm_asymptotic(-0.05, 0.05, 5.0) ==
        Catch::Approx(0.30).margin(1e-12));
  CHECK_THROWS_AS(mddkit::emdd_bm_asymptotic(0.05, 0.05, 0.1), std::domain_error);
  CHECK_THROWS_AS(mddkit::emdd_bm_asymptotic(0.05, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("asymptote agrees with the anchored tail at large x") {
  // Beyond the last knot the table reduces to the same log law; the offset is
  // only the last knot's Monte Carlo error.
  const double sigma = 0.05, years = 4.0;
  const double mu = sigma * std::sqrt(2.0 * 40.0 / years);  // x = 40
  const double via_table = mddkit::emdd_bm(mu, sigma, years, mini_pos()).value;
  const double via_asym = mddkit::emdd_bm_asymptotic(mu, sigma, years);
  CHECK(via_table == Catch::Approx(via_asym).epsilon(0.03));
}

TEST_CASE("default grid spans the crossover decades") {
  const auto grid = mddkit::default_x_grid();
  REQUIRE(grid.size() >= 30);
  CHECK(grid.front() == Catch::Approx(0.002));
  CHECK(grid.back() == Catch::Approx(50.0));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}
