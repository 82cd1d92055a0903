#pragma once

// Maximum drawdown of a (log-)level series and its ensemble statistics.
//
// The drawdown at time t is the gap between the running maximum up to t and
// the level at t; the maximum drawdown (MDD) is the largest such gap over the
// whole horizon.  Everything here is a single left-to-right pass: the full
// scan, the prefix curve, and the checkpointed variant share one update rule,
// and ties resolve to the earliest peak and earliest trough because only
// strict improvements replace the incumbent.

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mddkit/fbm.hpp"
#include "mddkit/parallel.hpp"

namespace mddkit {

struct DrawdownReport {
  double mdd = 0.0;
  std::size_t peak_index = 0;    // argmax of the running maximum at the MDD
  std::size_t trough_index = 0;  // index where the MDD is attained
};

inline DrawdownReport max_drawdown(std::span<const double> series) {
  if (series.empty()) throw std::invalid_argument("max_drawdown: empty series");
  DrawdownReport r;
  double run_max = series[0];
  std::size_t run_max_idx = 0;
  for (std::size_t t = 1; t < series.size(); ++t) {
    if (series[t] > run_max) {
      run_max = series[t];
      run_max_idx = t;
    }
    const double dd = run_max - series[t];
    if (dd > r.mdd) {
      r.mdd = dd;
      r.peak_index = run_max_idx;
      r.trough_index = t;
    }
  }
  return r;
}

// MDD of every prefix: out[t] is the maximum drawdown of series[0..t].
inline std::vector<double> prefix_drawdowns(std::span<const double> series) {
  if (series.empty()) throw std::invalid_argument("prefix_drawdowns: empty series");
  std::vector<double> out(series.size());
  double run_max = series[0];
  double best = 0.0;
  out[0] = 0.0;
  for (std::size_t t = 1; t < series.size(); ++t) {
    if (series[t] > run_max) run_max = series[t];
    const double dd = run_max - series[t];
    if (dd > best) best = dd;
    out[t] = best;
  }
  return out;
}

// Cut indices for k checkpoints over an n-step series (values has n+1
// entries): cut_i = ceil(i*n/k) for i = 1..k, so the last cut is always the
// final index and the cuts are as evenly spaced as integer arithmetic allows.
inline std::vector<std::size_t> checkpoint_indices(std::size_t n_steps,
                                                   std::size_t k) {
  if (n_steps < 1) throw std::invalid_argument("checkpoint_indices: need >= 1 step");
  if (k < 1 || k > n_steps)
    throw std::invalid_argument("checkpoint_indices: need 1 <= k <= n_steps");
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 1; i <= k; ++i) idx[i - 1] = (i * n_steps + k - 1) / k;
  return idx;
}

struct Checkpoint {
  double t_days = 0.0;
  double mdd = 0.0;
};

// Prefix MDD sampled at k checkpoints.
inline std::vector<Checkpoint> mdd_checkpoints(std::span<const double> series,
                                               std::size_t k,
                                               double dt_days = 1.0) {
  if (series.size() < 2)
    throw std::invalid_argument("mdd_checkpoints: need at least 2 values");
  const std::vector<std::size_t> idx = checkpoint_indices(series.size() - 1, k);
  std::vector<Checkpoint> out(k);
  double run_max = series[0];
  double best = 0.0;
  std::size_t next = 0;
  for (std::size_t t = 1; t < series.size() && next < k; ++t) {
    if (series[t] > run_max) run_max = series[t];
    const double dd = run_max - series[t];
    if (dd > best) best = dd;
    while (next < k && idx[next] == t) {
      out[next] = {static_cast<double>(idx[next]) * dt_days, best};
      ++next;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ensemble E(MDD) estimation
// ---------------------------------------------------------------------------

struct EmddPoint {
  double t_days = 0.0;
  double emdd = 0.0;
  double std_error = 0.0;
};

struct EmddCurve {
  double hurst = 0.5;
  std::vector<EmddPoint> points;
  std::int64_t replicates = 0;
};

// Monte Carlo estimate of t -> E[MDD(t)] for the configured model, evaluated
// at k checkpoints (k == 0 means every step).  Streams one path at a time, so
// memory is O(path length + k), independent of the replicate count.  Results
// are bitwise independent of the thread count: replicates are processed in
// fixed chunks and chunk statistics merge in index order.
inline EmddCurve estimate_emdd(const SimConfig& cfg, std::size_t k = 0,
                               int threads = 0) {
  cfg.validate();
  const std::size_t n = static_cast<std::size_t>(cfg.step_count());
  if (k == 0) k = n;
  const std::vector<std::size_t> idx = checkpoint_indices(n, k);
  const double dt = cfg.dt_days();

  std::optional<FgnGenerator> owned;
  if (cfg.sigma_annual > 0.0) owned.emplace(cfg.step_count(), cfg.hurst);
  const FgnGenerator* gen = owned ? &*owned : nullptr;

  std::vector<RunningStat> acc(k);

  auto reduce_chunk = [&](std::vector<RunningStat>& local, std::int64_t begin,
                          std::int64_t end) {
    for (std::int64_t r = begin; r < end; ++r) {
      const Path p = detail::make_path(cfg, gen, static_cast<std::uint64_t>(r));
      double run_max = p.values[0];
      double best = 0.0;
      std::size_t next = 0;
      for (std::size_t t = 1; t < p.values.size() && next < k; ++t) {
        if (p.values[t] > run_max) run_max = p.values[t];
        const double dd = run_max - p.values[t];
        if (dd > best) best = dd;
        while (next < k && idx[next] == t) local[next].add(best), ++next;
      }
    }
  };

  // Ordered on-the-fly merge: completed chunks wait in `pending` until all
  // their predecessors have merged, so memory stays bounded and the merge
  // order (hence every output bit) is schedule-independent.  The sequential
  // case runs the identical code with the chunks arriving in order.
  std::mutex mu;
  std::vector<std::pair<std::int64_t, std::vector<RunningStat>>> pending;
  std::int64_t next_merge = 0;
  for_each_chunk(cfg.replicates, threads,
                 [&](std::int64_t chunk, std::int64_t begin, std::int64_t end) {
                   std::vector<RunningStat> local(k);
                   reduce_chunk(local, begin, end);
                   std::lock_guard<std::mutex> lock(mu);
                   pending.emplace_back(chunk, std::move(local));
                   bool advanced = true;
                   while (advanced) {
                     advanced = false;
                     for (std::size_t i = 0; i < pending.size(); ++i) {
                       if (pending[i].first != next_merge) continue;
                       for (std::size_t j = 0; j < k; ++j)
                         acc[j].merge(pending[i].second[j]);
                       pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(i));
                       ++next_merge;
                       advanced = true;
                       break;
                     }
                   }
                 });

  EmddCurve curve;
  curve.hurst = cfg.hurst;
  curve.replicates = cfg.replicates;
  curve.points.resize(k);
  for (std::size_t j = 0; j < k; ++j)
    curve.points[j] = {static_cast<double>(idx[j]) * dt, acc[j].mean,
                       acc[j].stderr_mean()};
  return curve;
}

}  // namespace mddkit
