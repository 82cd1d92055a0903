#pragma once

// Distributional diagnostics for return series: log returns, the Jarque-Bera
// normality test (pointwise and scanned over all windows), and detrended
// fluctuation analysis (DFA) for the Hurst exponent.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace mddkit {

inline std::vector<double> log_returns(std::span<const double> prices) {
  if (prices.size() < 2)
    throw std::invalid_argument("log_returns: need at least 2 prices");
  std::vector<double> r(prices.size() - 1);
  for (std::size_t i = 0; i + 1 < prices.size(); ++i) {
    if (!(prices[i] > 0.0) || !(prices[i + 1] > 0.0))
      throw std::domain_error("log_returns: prices must be positive");
    r[i] = std::log(prices[i + 1] / prices[i]);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Jarque-Bera
// ---------------------------------------------------------------------------

// JB = n/6 * (S^2 + (K-3)^2 / 4) with raw kurtosis K; asymptotically
// chi-square with 2 degrees of freedom under normality, so the p-value has
// the exact closed form exp(-JB/2).
inline double jarque_bera_statistic(std::size_t n, double skewness,
                                    double kurtosis) {
  const double excess = kurtosis - 3.0;
  return static_cast<double>(n) / 6.0 *
         (skewness * skewness + 0.25 * excess * excess);
}

struct JbResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double skewness = 0.0;
  double kurtosis = 3.0;
};

inline JbResult jarque_bera(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 8) throw std::invalid_argument("jarque_bera: need n >= 8");
  double mean = 0.0;
  for (double x : sample) mean += x;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : sample) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (!(m2 > 0.0))
    throw std::domain_error("jarque_bera: zero-variance sample");
  JbResult r;
  r.skewness = m3 / std::pow(m2, 1.5);
  r.kurtosis = m4 / (m2 * m2);
  r.statistic = jarque_bera_statistic(n, r.skewness, r.kurtosis);
  r.p_value = std::exp(-0.5 * r.statistic);
  return r;
}

// ---------------------------------------------------------------------------
// Windowed JB scan
// ---------------------------------------------------------------------------

enum class JbOutcome : std::int8_t { window_empty = -1, accept = 0, reject = 1 };

// Outcome of the JB test on every increment window (start k, width j) with
// j >= min_width.  Backed by prefix sums of centered increment powers, so the
// whole scan is O(1) per cell after one pass over the series.  Windows whose
// increments are degenerate (zero variance) carry no decision and report
// window_empty, as do coordinates outside the triangular valid region.
class JbGrid {
 public:
  JbGrid(std::size_t n_increments, std::size_t min_width, double significance)
      : n_(n_increments), min_width_(min_width), alpha_(significance) {
    offsets_.resize(rows() + 1, 0);
    for (std::size_t k = 0; k < rows(); ++k)
      offsets_[k + 1] = offsets_[k] + (n_ - k - min_width_ + 1);
    cells_.assign(offsets_.back(), static_cast<std::int8_t>(JbOutcome::window_empty));
  }

  std::size_t n_increments() const { return n_; }
  std::size_t min_width() const { return min_width_; }
  double significance() const { return alpha_; }

  // Number of distinct window starts / of stored cells.
  std::size_t rows() const { return n_ - min_width_ + 1; }
  std::size_t cell_count() const { return cells_.size(); }

  bool valid(std::size_t start, std::size_t width) const {
    return start < rows() && width >= min_width_ && start + width <= n_;
  }

  JbOutcome outcome(std::size_t start, std::size_t width) const {
    if (!valid(start, width)) return JbOutcome::window_empty;
    return static_cast<JbOutcome>(cells_[offsets_[start] + (width - min_width_)]);
  }

  void set(std::size_t start, std::size_t width, JbOutcome o) {
    if (!valid(start, width))
      throw std::invalid_argument("jb grid: cell out of range");
    cells_[offsets_[start] + (width - min_width_)] = static_cast<std::int8_t>(o);
  }

  std::size_t count(JbOutcome o) const {
    std::size_t c = 0;
    for (std::int8_t v : cells_)
      if (v == static_cast<std::int8_t>(o)) ++c;
    return c;
  }

 private:
  std::size_t n_, min_width_;
  double alpha_;
  std::vector<std::size_t> offsets_;
  std::vector<std::int8_t> cells_;
};

// Scans the increments of `levels` (e.g. a log-price series).
inline JbGrid jb_scan(std::span<const double> levels,
                      std::size_t min_width = 256, double significance = 0.05) {
  if (min_width < 8)
    throw std::invalid_argument("jb_scan: min_width must be >= 8");
  if (!(significance > 0.0 && significance < 1.0))
    throw std::invalid_argument("jb_scan: significance must lie in (0, 1)");
  if (levels.size() < min_width + 1)
    throw std::invalid_argument("jb_scan: series shorter than min_width + 1");

  const std::size_t n = levels.size() - 1;
  std::vector<double> r(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = levels[i + 1] - levels[i];
    mean += r[i];
  }
  mean /= static_cast<double>(n);

  // Prefix sums of powers of globally centered increments; centering keeps
  // the windowed central-moment algebra numerically benign.
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0), s3(n + 1, 0.0), s4(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = r[i] - mean;
    const double c2 = c * c;
    s1[i + 1] = s1[i] + c;
    s2[i + 1] = s2[i] + c2;
    s3[i + 1] = s3[i] + c2 * c;
    s4[i + 1] = s4[i] + c2 * c2;
  }

  JbGrid grid(n, min_width, significance);
  for (std::size_t k = 0; k + min_width <= n; ++k) {
    for (std::size_t j = min_width; k + j <= n; ++j) {
      const double w = static_cast<double>(j);
      const double w1 = (s1[k + j] - s1[k]) / w;
      const double w2 = (s2[k + j] - s2[k]) / w;
      const double w3 = (s3[k + j] - s3[k]) / w;
      const double w4 = (s4[k + j] - s4[k]) / w;
      const double m2 = w2 - w1 * w1;
      if (!(m2 > 0.0)) continue;  // degenerate window: no decision
      const double m3 = w3 - 3.0 * w1 * w2 + 2.0 * w1 * w1 * w1;
      const double m4 =
          w4 - 4.0 * w1 * w3 + 6.0 * w1 * w1 * w2 - 3.0 * w1 * w1 * w1 * w1;
      const double skew = m3 / (m2 * std::sqrt(m2));
      const double kurt = m4 / (m2 * m2);
      const double jb = jarque_bera_statistic(j, skew, kurt);
      const double p = std::exp(-0.5 * jb);
      grid.set(k, j, p < significance ? JbOutcome::reject : JbOutcome::accept);
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Detrended fluctuation analysis
// ---------------------------------------------------------------------------

struct DfaResult {
  double hurst_estimate = 0.0;
  std::vector<std::size_t> box_sizes;
  std::vector<double> fluctuations;
  double fit_r2 = 0.0;
  // Detrending annihilated the profile (e.g. constant returns); no exponent.
  bool degenerate = false;
};

// Integrated, mean-subtracted profile of a return series.
inline std::vector<double> dfa_profile(std::span<const double> returns) {
  if (returns.empty()) throw std::invalid_argument("dfa_profile: empty input");
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(returns.size());
  std::vector<double> y(returns.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    acc += returns[i] - mean;
    y[i] = acc;
  }
  return y;
}

// Log-spaced unique box sizes in [lo, hi].
inline std::vector<std::size_t> dfa_box_sizes(std::size_t lo, std::size_t hi,
                                              std::size_t count = 20) {
  if (lo < 2 || hi < lo) throw std::invalid_argument("dfa_box_sizes: bad range");
  if (count < 2) throw std::invalid_argument("dfa_box_sizes: need >= 2 sizes");
  std::vector<std::size_t> sizes;
  const double ratio = std::log(static_cast<double>(hi) / static_cast<double>(lo)) /
                       static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const auto s = static_cast<std::size_t>(
        std::lround(static_cast<double>(lo) * std::exp(ratio * static_cast<double>(i))));
    if (sizes.empty() || s > sizes.back()) sizes.push_back(s);
  }
  return sizes;
}

namespace detail {

// Least-squares polynomial detrending residual for one box, via normal
// equations on [-1, 1]-scaled positions.  The SPD system is inverted once
// per box size and reused for every box (see DfaDetrender).
class DfaDetrender {
 public:
  DfaDetrender(std::size_t box, int order) : box_(box), dim_(order + 1) {
    if (order < 0 || order > 5)
      throw std::invalid_argument("dfa: detrend order must be in [0, 5]");
    if (box_ < static_cast<std::size_t>(order) + 2)
      throw std::invalid_argument("dfa: box smaller than detrend order + 2");
    t_.resize(box_);
    for (std::size_t i = 0; i < box_; ++i)
      t_[i] = box_ == 1 ? 0.0
                        : -1.0 + 2.0 * static_cast<double>(i) /
                                     static_cast<double>(box_ - 1);
    double a[6][6] = {};
    for (std::size_t i = 0; i < box_; ++i) {
      double pw = 1.0;
      std::array<double, 6> powers{};
      for (int p = 0; p < dim_; ++p) {
        powers[static_cast<std::size_t>(p)] = pw;
        pw *= t_[i];
      }
      for (int p = 0; p < dim_; ++p)
        for (int q = 0; q < dim_; ++q)
          a[p][q] += powers[static_cast<std::size_t>(p)] *
                     powers[static_cast<std::size_t>(q)];
    }
    invert(a);
  }

  // Sum of squared residuals of y[0..box) about its best-fit polynomial.
  double residual_ssq(const double* y) const {
    std::array<double, 6> b{}, c{};
    double yy = 0.0;
    for (std::size_t i = 0; i < box_; ++i) {
      double pw = 1.0;
      for (int p = 0; p < dim_; ++p) {
        b[static_cast<std::size_t>(p)] += y[i] * pw;
        pw *= t_[i];
      }
      yy += y[i] * y[i];
    }
    for (int p = 0; p < dim_; ++p)
      for (int q = 0; q < dim_; ++q)
        c[static_cast<std::size_t>(p)] +=
            inv_[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] *
            b[static_cast<std::size_t>(q)];
    double sse = yy;
    for (int p = 0; p < dim_; ++p)
      sse -= c[static_cast<std::size_t>(p)] * b[static_cast<std::size_t>(p)];
    return std::max(sse, 0.0);
  }

 private:
  void invert(double a[6][6]) {
    // Gauss-Jordan with partial pivoting on the (dim x dim) block.
    for (int p = 0; p < dim_; ++p)
      for (int q = 0; q < dim_; ++q)
        inv_[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] =
            (p == q) ? 1.0 : 0.0;
    for (int col = 0; col < dim_; ++col) {
      int pivot = col;
      for (int row = col + 1; row < dim_; ++row)
        if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
      if (a[pivot][col] == 0.0)
        throw std::runtime_error("dfa: singular detrending system");
      if (pivot != col)
        for (int q = 0; q < dim_; ++q) {
          std::swap(a[col][q], a[pivot][q]);
          std::swap(inv_[static_cast<std::size_t>(col)][static_cast<std::size_t>(q)],
                    inv_[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(q)]);
        }
      const double d = a[col][col];
      for (int q = 0; q < dim_; ++q) {
        a[col][q] /= d;
        inv_[static_cast<std::size_t>(col)][static_cast<std::size_t>(q)] /= d;
      }
      for (int row = 0; row < dim_; ++row) {
        if (row == col) continue;
        const double f = a[row][col];
        if (f == 0.0) continue;
        for (int q = 0; q < dim_; ++q) {
          a[row][q] -= f * a[col][q];
          inv_[static_cast<std::size_t>(row)][static_cast<std::size_t>(q)] -=
              f * inv_[static_cast<std::size_t>(col)][static_cast<std::size_t>(q)];
        }
      }
    }
  }

  std::size_t box_;
  int dim_;
  std::vector<double> t_;
  std::array<std::array<double, 6>, 6> inv_{};
};

}  // namespace detail

// RMS detrending residual of the profile at one box size, averaging
// non-overlapping boxes anchored at both ends so trailing samples count.
inline double dfa_fluctuation(std::span<const double> profile, std::size_t box,
                              int order = 1) {
  const std::size_t n = profile.size();
  if (box > n) throw std::invalid_argument("dfa_fluctuation: box exceeds series");
  const detail::DfaDetrender fit(box, order);
  const std::size_t n_boxes = n / box;
  double acc = 0.0;
  for (std::size_t b = 0; b < n_boxes; ++b)
    acc += fit.residual_ssq(profile.data() + b * box);
  for (std::size_t b = 0; b < n_boxes; ++b)
    acc += fit.residual_ssq(profile.data() + (n - (b + 1) * box));
  return std::sqrt(acc / (2.0 * static_cast<double>(n_boxes) *
                          static_cast<double>(box)));
}

// DFA estimate of the Hurst exponent from a return series: slope of
// log F(s) against log s over log-spaced box sizes.
inline DfaResult dfa_hurst(std::span<const double> returns, std::size_t box_lo,
                           std::size_t box_hi, int order = 1,
                           std::size_t n_sizes = 20) {
  if (returns.size() < 256)
    throw std::invalid_argument("dfa_hurst: need at least 256 returns");
  if (box_hi > returns.size() / 2)
    throw std::invalid_argument("dfa_hurst: largest box exceeds half the series");

  const std::vector<double> profile = dfa_profile(returns);
  double scale = 1.0;
  for (double y : profile) scale = std::max(scale, std::abs(y));

  DfaResult res;
  res.box_sizes = dfa_box_sizes(box_lo, box_hi, n_sizes);
  res.fluctuations.reserve(res.box_sizes.size());
  for (std::size_t s : res.box_sizes) {
    const double f = dfa_fluctuation(profile, s, order);
    res.fluctuations.push_back(f);
    if (f < 1e-13 * scale) res.degenerate = true;
  }
  if (res.degenerate) {
    res.hurst_estimate = std::nan("");
    return res;
  }

  // OLS in log-log coordinates.
  const std::size_t m = res.box_sizes.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(static_cast<double>(res.box_sizes[i]));
    const double y = std::log(res.fluctuations[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double dm = static_cast<double>(m);
  const double cov = sxy - sx * sy / dm;
  const double varx = sxx - sx * sx / dm;
  const double vary = syy - sy * sy / dm;
  res.hurst_estimate = cov / varx;
  res.fit_r2 = vary > 0.0 ? (cov * cov) / (varx * vary) : 1.0;
  return res;
}

inline DfaResult dfa_hurst(std::span<const double> returns, int order = 1) {
  if (returns.size() < 256)
    throw std::invalid_argument("dfa_hurst: need at least 256 returns");
  return dfa_hurst(returns, 8, returns.size() / 4, order);
}

}  // namespace mddkit
