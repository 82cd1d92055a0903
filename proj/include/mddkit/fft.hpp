#pragma once

// Radix-2 complex FFT, iterative Cooley-Tukey.  Sizes must be powers of two,
// which is all the circulant sampler ever needs.  Forward transform computes
// X[k] = sum_j x[j] exp(-2*pi*i*j*k/n); the inverse includes the 1/n factor,
// so inverse(forward(x)) == x.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mddkit::fft {

inline constexpr bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

inline constexpr std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline void transform(std::vector<std::complex<double>>& a, bool inverse = false) {
  const std::size_t n = a.size();
  if (n == 0) throw std::invalid_argument("fft: empty input");
  if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");
  if (n == 1) return;

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  // Twiddle table w[j] = exp(sign * 2*pi*i*j/n), j < n/2, computed directly
  // from the angle so accuracy does not degrade with transform size.
  static constexpr double two_pi = 6.283185307179586476925286766559;
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> roots(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double ang = sign * two_pi * static_cast<double>(j) / static_cast<double>(n);
    roots[j] = {std::cos(ang), std::sin(ang)};
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::complex<double> u = a[base + j];
        const std::complex<double> v = a[base + j + half] * roots[j * stride];
        a[base + j] = u + v;
        a[base + j + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv_n;
  }
}

}  // namespace mddkit::fft
