#pragma once

// Seeding utilities.  Every stochastic routine in the library derives its
// generator state from a (base seed, stream index) pair so that results are
// reproducible run-to-run and independent of how work is scheduled across
// threads: stream i always gets the same generator no matter who runs it.

#include <cstdint>
#include <random>

namespace mddkit {

using Rng = std::mt19937_64;

// Finalizer of the splitmix64 generator.  Good 64->64 bit mixer; distinct
// inputs give statistically independent-looking outputs.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives the seed for stream `stream` of a run keyed by `seed`.  The double
// mix keeps nearby (seed, stream) pairs far apart in state space.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed ^ 0x6a09e667f3bcc909ULL) + stream);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(derive_seed(seed, stream));
}

}  // namespace mddkit
