#pragma once

// Deterministic work partitioning.  Replicate loops are split into chunks of
// a fixed size that does not depend on the thread count; workers claim chunks
// from an atomic counter and the caller merges per-chunk results in chunk
// order.  Numerical output is therefore bitwise identical for any --threads
// value, which the test suite asserts.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace mddkit {

// Chunk size used by every replicate loop in the library.
inline constexpr std::int64_t k_chunk_size = 64;

inline int resolve_threads(int requested) {
  if (requested < 0) throw std::invalid_argument("threads must be >= 0");
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(chunk_index, begin, end) over [0, count) split into fixed chunks.
// Chunks may execute concurrently and in any order; the body must write only
// to per-chunk state indexed by chunk_index.
template <class Body>
void for_each_chunk(std::int64_t count, int threads, const Body& body) {
  if (count <= 0) return;
  const std::int64_t n_chunks = (count + k_chunk_size - 1) / k_chunk_size;
  threads = resolve_threads(threads);
  if (threads == 1 || n_chunks == 1) {
    for (std::int64_t c = 0; c < n_chunks; ++c)
      body(c, c * k_chunk_size, std::min(count, (c + 1) * k_chunk_size));
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      body(c, c * k_chunk_size, std::min(count, (c + 1) * k_chunk_size));
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = static_cast<int>(std::min<std::int64_t>(threads, n_chunks));
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// Streaming mean/variance accumulator (Welford), mergeable so that chunked
// loops can combine partial results in a fixed order.
struct RunningStat {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const RunningStat& o) noexcept {
    if (o.n == 0) return;
    if (n == 0) { *this = o; return; }
    const double d = o.mean - mean;
    const std::int64_t nt = n + o.n;
    mean += d * static_cast<double>(o.n) / static_cast<double>(nt);
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) /
                     static_cast<double>(nt);
    n = nt;
  }

  // Unbiased sample variance.
  double variance() const noexcept {
    return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  }
  double stddev() const noexcept { return std::sqrt(variance()); }
  // Standard error of the sample mean.
  double stderr_mean() const noexcept {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

}  // namespace mddkit
