#pragma once

// Risk-adjusted performance ratios and their drawdown-based relatives.
//
// Sharpe = mu / sigma compares mean return to volatility per period; Calmar
// divides the cumulative return mu*T by the (expected) maximum drawdown.  For
// Brownian log-prices the two are linked through the drawdown scaling
// function: with x = T*Shrp^2/2,
//
//   Calmar(T)      = x / Qp(x)
//   E[MDD] / sigma = 2 Qp(x) / Shrp
//
// and for large x the Calmar ratio grows like
// T*Shrp^2 / (0.63518 + 0.5 ln T + ln Shrp).  All horizons here are in the
// same time unit as mu and sigma (conventionally years).

#include <cmath>
#include <stdexcept>

#include "mddkit/theory.hpp"

namespace mddkit {

enum class PeriodUnit { annual, daily };

// Inputs for the ratio family, tagged with the period convention so that
// mixed-frequency inputs are an explicit, visible choice.
struct MetricInputs {
  double mu = 0.0;       // mean return per period
  double sigma = 0.0;    // return standard deviation per period
  double horizon = 0.0;  // measurement window, in periods
  double mdd = 0.0;      // realized or expected maximum drawdown
  PeriodUnit unit = PeriodUnit::annual;
};

inline double sharpe(double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("sharpe: sigma must be > 0");
  if (!std::isfinite(mu)) throw std::invalid_argument("sharpe: mu must be finite");
  return mu / sigma;
}

inline double calmar(double mu, double horizon, double mdd) {
  if (!std::isfinite(mu)) throw std::invalid_argument("calmar: mu must be finite");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("calmar: horizon must be > 0");
  if (!(mdd > 0.0) || !std::isfinite(mdd))
    throw std::domain_error("calmar: undefined for zero drawdown");
  return mu * horizon / mdd;
}

inline double sharpe(const MetricInputs& in) { return sharpe(in.mu, in.sigma); }
inline double calmar(const MetricInputs& in) {
  return calmar(in.mu, in.horizon, in.mdd);
}

// Expected Calmar ratio of a Bm log-price with the given Sharpe ratio over
// `years`, via the tabulated scaling function.  Positive Sharpe only.
inline double calmar_from_sharpe(double shrp, double years, const QTable& q_pos) {
  if (!(shrp > 0.0) || !std::isfinite(shrp))
    throw std::invalid_argument("calmar_from_sharpe: sharpe must be > 0");
  if (!(years > 0.0) || !std::isfinite(years))
    throw std::invalid_argument("calmar_from_sharpe: years must be > 0");
  if (q_pos.kind() != DriftSign::positive)
    throw std::invalid_argument("calmar_from_sharpe: need the positive-drift table");
  const double x = 0.5 * years * shrp * shrp;
  return x / q_pos.q(x);
}

// Large-horizon limit of the expected Calmar ratio.
inline double calmar_asymptotic(double shrp, double years) {
  if (!(shrp > 0.0) || !std::isfinite(shrp))
    throw std::invalid_argument("calmar_asymptotic: sharpe must be > 0");
  if (!(years > 0.0) || !std::isfinite(years))
    throw std::invalid_argument("calmar_asymptotic: years must be > 0");
  const double denom =
      k_asymptote_intercept + 0.5 * std::log(years) + std::log(shrp);
  if (!(denom > 0.0))
    throw std::domain_error("calmar_asymptotic: horizon too short for the limit");
  return years * shrp * shrp / denom;
}

// E[MDD] in units of sigma as a function of the Sharpe ratio: depends on
// (mu, sigma) only through Shrp, which is what makes the ratio comparable
// across assets.
inline double emdd_over_sigma(double shrp, double years, const QTable& q_pos) {
  if (!(years > 0.0) || !std::isfinite(years))
    throw std::invalid_argument("emdd_over_sigma: years must be > 0");
  if (!std::isfinite(shrp))
    throw std::invalid_argument("emdd_over_sigma: sharpe must be finite");
  if (shrp == 0.0) return k_driftless_mdd_coeff * std::sqrt(years);
  if (shrp < 0.0)
    throw std::invalid_argument("emdd_over_sigma: negative sharpe needs the negative-drift table");
  if (q_pos.kind() != DriftSign::positive)
    throw std::invalid_argument("emdd_over_sigma: need the positive-drift table");
  const double x = 0.5 * years * shrp * shrp;
  return 2.0 * q_pos.q(x) / shrp;
}

}  // namespace mddkit
