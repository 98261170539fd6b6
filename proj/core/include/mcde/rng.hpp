#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mcde {

//! splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Combines a base seed with tags into a derived seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) noexcept {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ mix64(a + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ mix64(b + 0x8cb92ba72f3d8dd7ULL));
  h = mix64(h ^ mix64(c + 0x4f1bbcdcbfa53e0bULL));
  return h;
}

//! Counter-based generator: the draw sequence of stream s under seed k is a pure
//! function of (k, s, counter), independent of platform and of other streams.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix64(seed ^ mix64(stream ^ 0xd1b54a32d192ed03ULL))) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ ^ mix64(counter_++)); }

  //! Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  //! Uniform on (0, 1); safe for log().
  double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  //! Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

  double normal() noexcept;
  double exponential() noexcept { return -std::log1p(-uniform()); }
  double gamma(double shape) noexcept;

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

//! Fisher-Yates shuffle of 0..n-1 driven by a CounterRng.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

} // namespace mcde
