#pragma once
// Deterministic splittable random streams for Monte Carlo paths.
//
// A stream is addressed by (seed, stream_index). The xoshiro256++ state is
// derived from both words through a splitmix64 chain, so every (seed, index)
// pair yields an independent, reproducible draw sequence. Draws depend only
// on the stream address and the call order within the stream, never on
// thread scheduling: one stream per path gives bit-identical simulations for
// any degree of parallelism.

#include <cmath>
#include <cstdint>

namespace subseries {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless mix of two words into one, used to derive per-job seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t a = seed;
  std::uint64_t b = salt + 0x632be59bd9b4e019ULL;
  return splitmix64(a) ^ (splitmix64(b) * 0xff51afd7ed558ccdULL);
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index) {
    std::uint64_t chain = mix_seed(seed, stream_index);
    for (auto& word : state_) word = splitmix64(chain);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() {
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

  // Uniform on [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the spare value is cached so a pair of
  // uniform draws serves two Gaussians.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double next_rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4] = {0, 0, 0, 0};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace subseries
