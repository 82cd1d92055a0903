#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>
#include <vector>

#include "mddkit/fft.hpp"

namespace {

using cd = std::complex<double>;

// O(n^2) reference transform.
std::vector<cd> naive_dft(const std::vector<cd>& x, bool inverse) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = sign * 2.0 * M_PI * static_cast<double>(j * k) /
                         static_cast<double>(n);
      acc += x[j] * cd{std::cos(ang), std::sin(ang)};
    }
    out[k] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

std::vector<cd> random_signal(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cd> x(n);
  for (auto& z : x) z = {u(gen), u(gen)};
  return x;
}

}  // namespace

TEST_CASE("power-of-two helpers") {
  CHECK(mddkit::fft::is_power_of_two(1));
  CHECK(mddkit::fft::is_power_of_two(1024));
  CHECK_FALSE(mddkit::fft::is_power_of_two(0));
  CHECK_FALSE(mddkit::fft::is_power_of_two(96));
  CHECK(mddkit::fft::next_power_of_two(1) == 1);
  CHECK(mddkit::fft::next_power_of_two(2) == 2);
  CHECK(mddkit::fft::next_power_of_two(129) == 256);
}

TEST_CASE("fft matches naive dft") {
  for (std::size_t n : {1u, 2u, 4u, 8u, 32u, 128u}) {
    auto x = random_signal(n, 100 + static_cast<unsigned>(n));
    auto want = naive_dft(x, false);
    auto got = x;
    mddkit::fft::transform(got);
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(got[k] - want[k]) < 1e-9);
  }
}

TEST_CASE("inverse undoes forward") {
  auto x = random_signal(512, 7);
  auto y = x;
  mddkit::fft::transform(y, false);
  mddkit::fft::transform(y, true);
  for (std::size_t k = 0; k < x.size(); ++k)
    CHECK(std::abs(y[k] - x[k]) < 1e-12);
}

TEST_CASE("delta and constant transforms") {
  std::vector<cd> delta(16, cd{0, 0});
  delta[0] = {1, 0};
  mddkit::fft::transform(delta);
  for (const auto& z : delta) CHECK(std::abs(z - cd{1, 0}) < 1e-12);

  std::vector<cd> ones(16, cd{1, 0});
  mddkit::fft::transform(ones);
  CHECK(std::abs(ones[0] - cd{16, 0}) < 1e-12);
  for (std::size_t k = 1; k < 16; ++k) CHECK(std::abs(ones[k]) < 1e-12);
}

TEST_CASE("parseval energy identity") {
  auto x = random_signal(256, 11);
  double time_energy = 0.0;
  for (const auto& z : x) time_energy += std::norm(z);
  auto y = x;
  mddkit::fft::transform(y);
  double freq_energy = 0.0;
  for (const auto& z : y) freq_energy += std::norm(z);
  CHECK(freq_energy / 256.0 == Catch::Approx(time_energy).epsilon(1e-12));
}

TEST_CASE("invalid sizes rejected") {
  std::vector<cd> empty;
  CHECK_THROWS_AS(mddkit::fft::transform(empty), std::invalid_argument);
  std::vector<cd> bad(24, cd{0, 0});
  CHECK_THROWS_AS(mddkit::fft::transform(bad), std::invalid_argument);
}
