#ifndef BCIWALL_RNG_HPP
#define BCIWALL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

// Deterministic random number generation. Every stream is a pure function of
// (seed, stream index), so Monte Carlo trials can be distributed across
// threads and still produce results identical to a serial run.
//
// Algorithms, fixed by contract:
//   * stream keys:  SplitMix64 (Steele, Lea, Flood 2014)
//   * core:         xoshiro256++ (Blackman, Vigna 2019)
//   * gaussians:    Box-Muller on 53-bit uniforms, no rejection step

namespace bciwall {

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 mix(seed);
    for (auto& word : state_) word = mix.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0, 1]; never returns 0 so it is safe under log().
  double uniform01() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

// Standard normal variates, two per Box-Muller transform.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.uniform01();
    const double u2 = rng_.uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  Xoshiro256pp rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Key for an independent substream. Streams with distinct indices derived
// from the same seed are decorrelated by the SplitMix64 avalanche.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream_index) {
  SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ull * (stream_index + 1)));
  return mix.next();
}

inline GaussianStream gaussian_stream(std::uint64_t seed, std::uint64_t stream_index) {
  return GaussianStream(stream_key(seed, stream_index));
}

}  // namespace bciwall

#endif
