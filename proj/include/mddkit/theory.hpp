#pragma once

// Expected maximum drawdown of drifted Brownian motion.
//
// For Bm with drift mu and volatility sigma over horizon T, E[MDD] depends on
// the parameters only through sigma^2/|mu| and the dimensionless combination
//
//   x = mu^2 T / (2 sigma^2):
//
//   mu > 0:  E[MDD] = (2 sigma^2 / mu)  * Qp(x)
//   mu = 0:  E[MDD] = sqrt(pi/2) * sigma * sqrt(T)
//   mu < 0:  E[MDD] = (2 sigma^2 / |mu|) * Qn(x)
//
// Qp and Qn have no elementary closed form in the crossover region, so they
// are tabulated once by brute-force Monte Carlo on a fine grid (QTable) and
// interpolated monotonically; outside the table the exact limiting laws take
// over:
//
//   Qp(x) -> sqrt(pi x)/2                 as x -> 0   (drift negligible)
//   Qp(x) -> 0.25 ln x + 0.49087750650536 as x -> inf
//   Qn(x) -> sqrt(pi x)/2                 as x -> 0
//   Qn(x) -> x + 1/2                      as x -> inf (pure linear loss)
//
// In the large-x limit the positive-drift expectation reduces to
// (sigma^2/mu) (0.63518 + 0.5 ln T + ln(mu/sigma)), which emdd_bm_asymptotic
// evaluates directly.  Both tails match the zero-drift branch continuously as
// mu -> 0.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <stdexcept>
#include <string>
#include <vector>

#include "mddkit/parallel.hpp"
#include "mddkit/rng.hpp"

namespace mddkit {

// sqrt(pi/2): E[MDD] / (sigma sqrt(T)) for driftless Bm.
inline constexpr double k_driftless_mdd_coeff = 1.2533141373155003;
// Intercept of the large-x tail of Qp: (euler_gamma + ln 4) / 4.
inline constexpr double k_qp_tail_intercept = 0.4908775065053559;
// Intercept of the large-T positive-drift expansion: 2*qp_tail - ln(2)/2.
inline constexpr double k_asymptote_intercept = 0.6351814227307391;
// sqrt(pi)/2: small-x coefficient of both scaling functions.
inline constexpr double k_small_x_coeff = 0.8862269254527580;

enum class DriftSign { positive, negative };

struct QTableMeta {
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  std::string created;     // ISO date of calibration
  std::string steps_rule;  // discretization used per knot
  std::string warning;     // non-empty if precision target was missed
};

// Tabulated scaling function on log-spaced knots with monotone cubic
// interpolation (Fritsch-Carlson) in ln x, and the exact limiting laws
// outside the knot range, anchored at the end knots for continuity.
class QTable {
 public:
  QTable() = default;
  QTable(DriftSign kind, std::vector<double> x, std::vector<double> q,
         QTableMeta meta = {})
      : kind_(kind), x_(std::move(x)), q_(std::move(q)), meta_(std::move(meta)) {
    validate();
    build_slopes();
  }

  DriftSign kind() const { return kind_; }
  const std::vector<double>& knots_x() const { return x_; }
  const std::vector<double>& knots_q() const { return q_; }
  const QTableMeta& meta() const { return meta_; }
  QTableMeta& meta() { return meta_; }
  double min_x() const { return x_.front(); }
  double max_x() const { return x_.back(); }

  void validate() const {
    if (x_.size() < 2) throw std::invalid_argument("qtable: need >= 2 knots");
    if (x_.size() != q_.size())
      throw std::invalid_argument("qtable: knot arrays differ in length");
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!(x_[i] > 0.0) || !std::isfinite(x_[i]))
        throw std::invalid_argument("qtable: knot x must be positive finite");
      if (!(q_[i] > 0.0) || !std::isfinite(q_[i]))
        throw std::invalid_argument("qtable: knot q must be positive finite");
      if (i > 0 && !(x_[i] > x_[i - 1]))
        throw std::invalid_argument("qtable: knot x must be strictly increasing");
      if (i > 0 && q_[i] < q_[i - 1])
        throw std::invalid_argument("qtable: knot q must be nondecreasing");
    }
  }

  // Scaling function value; positive for all x > 0.
  double q(double x) const {
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::domain_error("qtable: x must be positive finite");
    if (x < x_.front()) {
      // Two-term small-x law anchored at the first knot:
      //   Qp(x) ~ sqrt(pi x)/2 - x/2,   Qn(x) ~ sqrt(pi x)/2 + x/2.
      // The linear term is the first-order drift effect; without it the
      // extrapolation to x -> 0 inherits the first knot's full drift bias.
      // If the first knot sits beyond the monotone range of the two-term
      // form (positive kind only), fall back to the pure sqrt law.
      const double lin = kind_ == DriftSign::positive ? -0.5 : 0.5;
      auto law = [&](double z) { return k_small_x_coeff * std::sqrt(z) + lin * z; };
      if (kind_ == DriftSign::positive && x_.front() > 0.5)
        return q_.front() * std::sqrt(x / x_.front());
      return q_.front() * law(x) / law(x_.front());
    }
    if (x > x_.back()) {
      if (kind_ == DriftSign::positive)  // log tail, exact limiting slope
        return q_.back() + 0.25 * std::log(x / x_.back());
      return q_.back() + (x - x_.back());  // linear tail, unit slope
    }
    // Binary search for the containing interval, then cubic Hermite.
    const std::size_t hi = static_cast<std::size_t>(
        std::lower_bound(x_.begin(), x_.end(), x) - x_.begin());
    if (hi == 0) return q_.front();
    const std::size_t lo = hi - 1;
    const double u0 = std::log(x_[lo]), u1 = std::log(x_[hi]);
    const double h = u1 - u0;
    const double t = (std::log(x) - u0) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * q_[lo] + h10 * h * slope_[lo] + h01 * q_[hi] + h11 * h * slope_[hi];
  }

 private:
  void build_slopes() {
    const std::size_t n = x_.size();
    std::vector<double> u(n), delta(n - 1);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::log(x_[i]);
    for (std::size_t i = 0; i + 1 < n; ++i)
      delta[i] = (q_[i + 1] - q_[i]) / (u[i + 1] - u[i]);
    slope_.assign(n, 0.0);
    if (n == 2) {
      slope_[0] = slope_[1] = delta[0];
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;  // local extremum: flat
      const double h0 = u[i] - u[i - 1], h1 = u[i + 1] - u[i];
      const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
      slope_[i] = (w0 + w1) / (w0 / delta[i - 1] + w1 / delta[i]);
    }
    slope_[0] = endpoint_slope(u[1] - u[0], u[2] - u[1], delta[0], delta[1]);
    slope_[n - 1] = endpoint_slope(u[n - 1] - u[n - 2], u[n - 2] - u[n - 3],
                                   delta[n - 2], delta[n - 3]);
  }

  static double endpoint_slope(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  }

  DriftSign kind_ = DriftSign::positive;
  std::vector<double> x_, q_, slope_;
  QTableMeta meta_;
};

// Default calibration grid: log-spaced through the crossover region; the
// analytic tails carry everything outside it.
inline std::vector<double> default_x_grid() {
  constexpr double lo = 0.002, hi = 50.0;
  constexpr std::size_t count = 36;
  std::vector<double> x(count);
  const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    x[i] = lo * std::exp(ratio * static_cast<double>(i));
  x.back() = hi;
  return x;
}

namespace detail {

// Mean MDD of unit-volatility Bm with drift ±1 over horizon T = 2x, from
// `replicates` discrete paths of n steps.  Tight loop: no path is stored.
inline RunningStat qtable_knot_stat(double x, DriftSign kind, std::int64_t n,
                                    std::int64_t replicates,
                                    std::uint64_t knot_seed, int threads) {
  const double horizon = 2.0 * x;
  const double dt = horizon / static_cast<double>(n);
  const double drift = (kind == DriftSign::positive ? dt : -dt);
  const double scale = std::sqrt(dt);

  const std::int64_t n_chunks = (replicates + k_chunk_size - 1) / k_chunk_size;
  std::vector<RunningStat> partial(static_cast<std::size_t>(n_chunks));
  for_each_chunk(replicates, threads,
                 [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
                   RunningStat local;
                   for (std::int64_t r = begin; r < end; ++r) {
                     Rng rng = make_rng(knot_seed, static_cast<std::uint64_t>(r));
                     std::normal_distribution<double> normal;
                     double level = 0.0, run_max = 0.0, best = 0.0;
                     for (std::int64_t i = 0; i < n; ++i) {
                       level += drift + scale * normal(rng);
                       if (level > run_max) run_max = level;
                       const double dd = run_max - level;
                       if (dd > best) best = dd;
                     }
                     local.add(best);
                   }
                   partial[static_cast<std::size_t>(chunk)] = local;
                 });
  RunningStat total;
  for (const RunningStat& s : partial) total.merge(s);
  return total;
}

inline std::string today_iso() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

}  // namespace detail

// Calibrates a scaling-function table by Monte Carlo.  Knot k uses generator
// streams derived from (seed, k), so the table depends only on (grid,
// replicates, seed) — never on the thread count.  Discretization per knot:
// n = max(8192, 2048 * T) steps over the horizon T = 2x.  If any knot misses
// the 1% relative-precision target, a warning lands in the metadata.
inline QTable calibrate_qtable(DriftSign kind, const std::vector<double>& x_grid,
                               std::int64_t replicates, std::uint64_t seed,
                               int threads = 0) {
  if (x_grid.size() < 2)
    throw std::invalid_argument("calibrate_qtable: need >= 2 grid points");
  if (replicates < 2)
    throw std::invalid_argument("calibrate_qtable: need >= 2 replicates");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > 0.0) || !std::isfinite(x_grid[i]))
      throw std::invalid_argument("calibrate_qtable: grid must be positive finite");
    if (i > 0 && !(x_grid[i] > x_grid[i - 1]))
      throw std::invalid_argument("calibrate_qtable: grid must be strictly increasing");
  }

  std::vector<double> q(x_grid.size());
  std::string warning;
  for (std::size_t ki = 0; ki < x_grid.size(); ++ki) {
    const double x = x_grid[ki];
    const double horizon = 2.0 * x;
    const std::int64_t n = std::max<std::int64_t>(
        8192, static_cast<std::int64_t>(std::ceil(2048.0 * horizon)));
    const RunningStat s = detail::qtable_knot_stat(
        x, kind, n, replicates, derive_seed(seed, ki), threads);
    q[ki] = 0.5 * s.mean;  // Q = E[MDD] * |mu| / (2 sigma^2) with mu=±1, sigma=1
    const double rel_err = s.stderr_mean() / s.mean;
    if (rel_err > 0.01) {
      if (!warning.empty()) warning += "; ";
      warning += "knot x=" + std::to_string(x) + " rel stderr " +
                 std::to_string(rel_err) + " exceeds 0.01 target";
    }
  }

  // The true scaling function is nondecreasing; sampling noise can still
  // produce local inversions between closely spaced knots.  Project the
  // estimates onto the monotone cone (pool adjacent violators, equal
  // weights) so the table always satisfies its invariant.
  bool adjusted = false;
  {
    std::vector<double> level = q;
    std::vector<std::size_t> count(q.size(), 1);
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      level[blocks] = q[i];
      count[blocks] = 1;
      ++blocks;
      while (blocks > 1 && level[blocks - 2] > level[blocks - 1]) {
        const double total = level[blocks - 2] * static_cast<double>(count[blocks - 2]) +
                             level[blocks - 1] * static_cast<double>(count[blocks - 1]);
        count[blocks - 2] += count[blocks - 1];
        level[blocks - 2] = total / static_cast<double>(count[blocks - 2]);
        --blocks;
        adjusted = true;
      }
    }
    if (adjusted) {
      std::size_t pos = 0;
      for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t c = 0; c < count[b]; ++c) q[pos++] = level[b];
    }
  }
  if (adjusted) {
    if (!warning.empty()) warning += "; ";
    warning += "monotone correction applied to noisy knots";
  }

  QTableMeta meta;
  meta.replicates = replicates;
  meta.seed = seed;
  meta.created = detail::today_iso();
  meta.steps_rule = "n = max(8192, 2048*T), T = 2x";
  if (!warning.empty())
    meta.warning = warning + "; increase replicates for target precision";
  return QTable(kind, x_grid, std::move(q), std::move(meta));
}

// ---------------------------------------------------------------------------
// E(MDD) evaluation
// ---------------------------------------------------------------------------

enum class EmddBranch { positive_drift, zero_drift, negative_drift };
enum class EmddMethod { closed_form, table, asymptotic };

struct EmddEstimate {
  double value = 0.0;
  EmddBranch branch = EmddBranch::zero_drift;
  EmddMethod method = EmddMethod::closed_form;
};

namespace detail {

inline void check_emdd_args(double sigma, double years) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("emdd: sigma must be > 0");
  if (!(years > 0.0) || !std::isfinite(years))
    throw std::invalid_argument("emdd: years must be > 0");
}

}  // namespace detail

// E[MDD] for Bm(mu, sigma) over `years`, using `table` for the drifted
// branches.  The table's kind must match the sign of mu; the zero-drift
// branch is closed-form and ignores the table.
inline EmddEstimate emdd_bm(double mu, double sigma, double years,
                            const QTable& table) {
  detail::check_emdd_args(sigma, years);
  if (!std::isfinite(mu)) throw std::invalid_argument("emdd: mu must be finite");

  EmddEstimate e;
  if (mu == 0.0) {
    e.branch = EmddBranch::zero_drift;
    e.method = EmddMethod::closed_form;
    e.value = k_driftless_mdd_coeff * sigma * std::sqrt(years);
    return e;
  }
  const DriftSign want = mu > 0.0 ? DriftSign::positive : DriftSign::negative;
  if (table.kind() != want)
    throw std::invalid_argument("emdd: table kind does not match drift sign");
  const double x = mu * mu * years / (2.0 * sigma * sigma);
  e.branch = mu > 0.0 ? EmddBranch::positive_drift : EmddBranch::negative_drift;
  e.method = x > table.max_x() ? EmddMethod::asymptotic : EmddMethod::table;
  e.value = (2.0 * sigma * sigma / std::abs(mu)) * table.q(x);
  return e;
}

inline EmddEstimate emdd_bm(double mu, double sigma, double years,
                            const QTable& q_pos, const QTable& q_neg) {
  if (std::isfinite(mu) && mu < 0.0) return emdd_bm(mu, sigma, years, q_neg);
  return emdd_bm(mu, sigma, years, q_pos);
}

// Large-horizon limiting law, evaluated without a table.  Exact for mu = 0;
// for mu > 0 valid once x = mu^2 T / (2 sigma^2) is well above 1; for mu < 0
// the dominant linear loss plus the sigma^2/|mu| correction.
inline double emdd_bm_asymptotic(double mu, double sigma, double years) {
  detail::check_emdd_args(sigma, years);
  if (!std::isfinite(mu)) throw std::invalid_argument("emdd: mu must be finite");
  if (mu == 0.0) return k_driftless_mdd_coeff * sigma * std::sqrt(years);
  if (mu > 0.0) {
    const double v = k_asymptote_intercept + 0.5 * std::log(years) +
                     std::log(mu / sigma);
    if (!(v > 0.0))
      throw std::domain_error(
          "emdd_bm_asymptotic: horizon too short for the positive-drift limit");
    return sigma * sigma / mu * v;
  }
  return std::abs(mu) * years + sigma * sigma / std::abs(mu);
}

}  // namespace mddkit
