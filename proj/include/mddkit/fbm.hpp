#pragma once

// Fractional Brownian motion simulation.
//
// Paths are built from fractional Gaussian noise (fGn), the stationary
// increment process of fBm with Hurst index H.  Unit-variance fGn has
// autocovariance
//
//   gamma(k) = 0.5 * (|k-1|^{2H} - 2|k|^{2H} + |k+1|^{2H}),
//
// which the sampler reproduces exactly (in distribution).  The default
// algorithm embeds the n x n Toeplitz covariance into a circulant matrix of
// power-of-two size m >= 2(n-1), diagonalizes it with one FFT, and synthesizes
// samples in O(m log m).  If the embedding is not positive semi-definite the
// generator falls back to exact O(n^2) recursive conditional sampling.
//
// Time units: one model year is divided into steps_per_year equal steps, and
// one year equals 256 trading days, so a step spans 256/steps_per_year days.
// The per-step increment is mu_annual/steps_per_year plus
// sigma_annual * (1/steps_per_year)^H times unit fGn; at H=1/2 this is the
// familiar sqrt-dt diffusive scaling, and the self-similarity tests pin the
// general-H law.

#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mddkit/fft.hpp"
#include "mddkit/parallel.hpp"
#include "mddkit/rng.hpp"

namespace mddkit {

inline constexpr double k_trading_days_per_year = 256.0;

// ---------------------------------------------------------------------------
// Configuration and path containers
// ---------------------------------------------------------------------------

struct SimConfig {
  double hurst = 0.5;
  double mu_annual = 0.0;
  double sigma_annual = 0.05;
  double years = 1.0;
  std::int64_t steps_per_year = 256;
  std::int64_t replicates = 1;
  std::uint64_t seed = 0;

  std::int64_t step_count() const {
    return static_cast<std::int64_t>(
        std::llround(years * static_cast<double>(steps_per_year)));
  }

  double dt_days() const {
    return k_trading_days_per_year / static_cast<double>(steps_per_year);
  }

  void validate() const {
    if (!(hurst > 0.0 && hurst < 1.0))
      throw std::invalid_argument("hurst must lie in (0, 1)");
    if (!std::isfinite(mu_annual))
      throw std::invalid_argument("mu_annual must be finite");
    if (!(sigma_annual >= 0.0) || !std::isfinite(sigma_annual))
      throw std::invalid_argument("sigma_annual must be >= 0");
    if (!(years > 0.0) || !std::isfinite(years))
      throw std::invalid_argument("years must be > 0");
    if (steps_per_year < 1)
      throw std::invalid_argument("steps_per_year must be >= 1");
    if (replicates < 1)
      throw std::invalid_argument("replicates must be >= 1");
    if (step_count() < 1)
      throw std::invalid_argument("years * steps_per_year must be >= 1");
  }
};

// One simulated log-price path.  values[0] == 0 and values has n+1 entries
// for n steps; entry i sits at time i * dt_days trading days.
struct Path {
  double dt_days = 1.0;
  std::vector<double> values;

  std::size_t steps() const { return values.empty() ? 0 : values.size() - 1; }
};

// ---------------------------------------------------------------------------
// Fractional Gaussian noise
// ---------------------------------------------------------------------------

// Autocovariance of unit-variance fGn at integer lag.
inline double fgn_covariance(std::int64_t lag, double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::invalid_argument("hurst must lie in (0, 1)");
  const double k = std::abs(static_cast<double>(lag));
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(k - 1.0), h2) - 2.0 * std::pow(k, h2) +
                std::pow(k + 1.0, h2));
}

// Exact recursive conditional sampler (O(n^2)): draws x_i from its normal
// conditional distribution given x_0..x_{i-1} using a Levinson-type update of
// the prediction coefficients.  Used directly for small n and as the fallback
// when the circulant embedding fails.
inline std::vector<double> sample_fgn_recursive(std::int64_t n, double hurst,
                                                Rng& rng) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::normal_distribution<double> normal;
  std::vector<double> x(static_cast<std::size_t>(n));
  x[0] = normal(rng);  // gamma(0) == 1
  if (n == 1) return x;

  std::vector<double> acvf(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k)
    acvf[static_cast<std::size_t>(k)] = fgn_covariance(k, hurst);

  std::vector<double> phi;      // prediction coefficients, current order
  std::vector<double> phi_new;
  phi.reserve(static_cast<std::size_t>(n));
  phi_new.reserve(static_cast<std::size_t>(n));
  double v = acvf[0];  // one-step prediction variance

  for (std::int64_t i = 1; i < n; ++i) {
    const std::size_t order = phi.size();  // == i - 1
    double num = acvf[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < order; ++j)
      num -= phi[j] * acvf[static_cast<std::size_t>(i) - 1 - j];
    const double kappa = num / v;

    phi_new.resize(order + 1);
    for (std::size_t j = 0; j < order; ++j)
      phi_new[j] = phi[j] - kappa * phi[order - 1 - j];
    phi_new[order] = kappa;
    phi.swap(phi_new);
    v *= (1.0 - kappa * kappa);
    if (!(v > 0.0))
      throw std::runtime_error("recursive fGn sampler: prediction variance underflow");

    double mean = 0.0;
    for (std::size_t j = 0; j <= order; ++j)
      mean += phi[j] * x[static_cast<std::size_t>(i) - 1 - j];
    x[static_cast<std::size_t>(i)] = mean + std::sqrt(v) * normal(rng);
  }
  return x;
}

// Stationary fGn sampler with a precomputed circulant spectrum.  Construction
// is O(m log m); each sample() is one FFT.  Instances are immutable after
// construction and safe to share across threads (sample() uses only local
// buffers plus the caller's generator).
class FgnGenerator {
 public:
  enum class Method { iid, circulant, recursive };

  FgnGenerator(std::int64_t n, double hurst) : n_(n), hurst_(hurst) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(hurst > 0.0 && hurst < 1.0))
      throw std::invalid_argument("hurst must lie in (0, 1)");

    if (hurst == 0.5 || n == 1) {  // increments are already independent
      method_ = Method::iid;
      return;
    }

    const std::size_t m = embedding_size(n);
    std::vector<double> eig = embedding_eigenvalues(n, hurst);
    double min_eig = eig[0];
    for (double e : eig) min_eig = std::min(min_eig, e);
    if (min_eig < k_eigenvalue_floor) {
      // Embedding is not (numerically) psd; use the exact sampler instead.
      method_ = Method::recursive;
      fallback_ = true;
      std::cerr << "mddkit: circulant embedding rejected for n=" << n
                << " H=" << hurst << " (min eigenvalue " << min_eig
                << "); using exact recursive sampler\n";
      return;
    }

    method_ = Method::circulant;
    amp_.resize(m / 2 + 1);
    const double dm = static_cast<double>(m);
    for (std::size_t k = 0; k <= m / 2; ++k) {
      const double lam = std::max(eig[k], 0.0);  // clamp tiny negatives
      const bool self_paired = (k == 0 || k == m / 2);
      amp_[k] = std::sqrt(lam / (self_paired ? dm : 2.0 * dm));
    }
  }

  std::int64_t size() const { return n_; }
  double hurst() const { return hurst_; }
  Method method() const { return method_; }
  bool used_fallback() const { return fallback_; }

  // Circulant size for an n-step sample: smallest power of two >= 2(n-1).
  static std::size_t embedding_size(std::int64_t n) {
    const std::size_t need = n > 1 ? 2 * (static_cast<std::size_t>(n) - 1) : 2;
    return fft::next_power_of_two(need);
  }

  // Eigenvalues of the circulant embedding (the FFT of its first row).
  static std::vector<double> embedding_eigenvalues(std::int64_t n, double hurst) {
    const std::size_t m = embedding_size(n);
    std::vector<std::complex<double>> row(m);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t lag = std::min(j, m - j);
      row[j] = fgn_covariance(static_cast<std::int64_t>(lag), hurst);
    }
    fft::transform(row);
    std::vector<double> eig(m);
    for (std::size_t j = 0; j < m; ++j) eig[j] = row[j].real();
    return eig;
  }

  // Draws one length-n sample.  The number and order of normal variates per
  // call is fixed by (n, hurst), so a given (seed, stream) pair always maps
  // to the same sample.
  std::vector<double> sample(Rng& rng) const {
    switch (method_) {
      case Method::iid: {
        std::normal_distribution<double> normal;
        std::vector<double> x(static_cast<std::size_t>(n_));
        for (auto& xi : x) xi = normal(rng);
        return x;
      }
      case Method::recursive:
        return sample_fgn_recursive(n_, hurst_, rng);
      case Method::circulant:
        break;
    }

    const std::size_t m = (amp_.size() - 1) * 2;
    std::normal_distribution<double> normal;
    std::vector<std::complex<double>> b(m);
    b[0] = amp_[0] * normal(rng);
    b[m / 2] = amp_[m / 2] * normal(rng);
    for (std::size_t k = 1; k < m / 2; ++k) {
      const double re = normal(rng);
      const double im = normal(rng);
      b[k] = {amp_[k] * re, amp_[k] * im};
      b[m - k] = std::conj(b[k]);
    }
    fft::transform(b);
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = b[i].real();
    return x;
  }

 private:
  static constexpr double k_eigenvalue_floor = -1e-10;

  std::int64_t n_;
  double hurst_;
  Method method_ = Method::iid;
  bool fallback_ = false;
  std::vector<double> amp_;  // circulant amplitudes, size m/2 + 1
};

// ---------------------------------------------------------------------------
// Path construction
// ---------------------------------------------------------------------------

namespace detail {

inline Path empty_path(const SimConfig& cfg) {
  Path p;
  p.dt_days = cfg.dt_days();
  p.values.assign(static_cast<std::size_t>(cfg.step_count()) + 1, 0.0);
  return p;
}

// Deterministic drift line for sigma = 0; consumes no random draws.
inline Path drift_path(const SimConfig& cfg) {
  const double drift = cfg.mu_annual / static_cast<double>(cfg.steps_per_year);
  Path p = empty_path(cfg);
  for (std::size_t i = 1; i < p.values.size(); ++i)
    p.values[i] = p.values[i - 1] + drift;
  return p;
}

inline Path noise_path(const SimConfig& cfg, const FgnGenerator& gen,
                       std::uint64_t replicate) {
  const double drift = cfg.mu_annual / static_cast<double>(cfg.steps_per_year);
  const double scale =
      cfg.sigma_annual *
      std::pow(1.0 / static_cast<double>(cfg.steps_per_year), cfg.hurst);
  Path p = empty_path(cfg);
  Rng rng = make_rng(cfg.seed, replicate);
  const std::vector<double> noise = gen.sample(rng);
  for (std::size_t i = 1; i < p.values.size(); ++i)
    p.values[i] = p.values[i - 1] + drift + scale * noise[i - 1];
  return p;
}

inline Path make_path(const SimConfig& cfg, const FgnGenerator* gen,
                      std::uint64_t replicate) {
  return gen ? noise_path(cfg, *gen, replicate) : drift_path(cfg);
}

}  // namespace detail

// Generates replicate `replicate` of the configured ensemble.  Replicates are
// indexed from 0; path r depends only on (cfg.seed, r, model parameters).
inline Path generate_path(const SimConfig& cfg, std::uint64_t replicate = 0) {
  cfg.validate();
  if (cfg.sigma_annual == 0.0) return detail::drift_path(cfg);
  const FgnGenerator gen(cfg.step_count(), cfg.hurst);
  return detail::noise_path(cfg, gen, replicate);
}

// Generates all cfg.replicates paths.  Materializes the whole ensemble; for
// large replicate counts prefer the streaming estimators, which discard each
// path after reducing it.
inline std::vector<Path> generate_ensemble(const SimConfig& cfg, int threads = 0) {
  cfg.validate();
  std::vector<Path> out(static_cast<std::size_t>(cfg.replicates));
  if (cfg.sigma_annual == 0.0) {
    for (std::int64_t r = 0; r < cfg.replicates; ++r)
      out[static_cast<std::size_t>(r)] = detail::drift_path(cfg);
    return out;
  }
  const FgnGenerator gen(cfg.step_count(), cfg.hurst);
  for_each_chunk(cfg.replicates, threads,
                 [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                   for (std::int64_t r = begin; r < end; ++r)
                     out[static_cast<std::size_t>(r)] = detail::noise_path(
                         cfg, gen, static_cast<std::uint64_t>(r));
                 });
  return out;
}

}  // namespace mddkit
