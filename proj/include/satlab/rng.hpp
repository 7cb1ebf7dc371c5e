#pragma once

// Deterministic, splittable random streams.
//
// A RandomStream is identified by a 64-bit master seed plus a derivation
// label. Same (seed, label) reproduces the identical sequence on any build;
// distinct labels give statistically independent streams, which is what
// makes per-instance / per-trial parallelism order-independent: derive one
// child stream per index and the results cannot depend on scheduling.
//
// Engine: xoshiro256++ seeded through splitmix64 (both public domain,
// Blackman & Vigna). No <random> distributions are used anywhere so that
// sequences are identical across standard library implementations.

#include <cstdint>

namespace satlab {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64(s);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t label = 0)
      : seed_(seed), label_(label) {
    std::uint64_t root = detail::mix64(detail::mix64(seed) ^ detail::mix64(~label));
    for (auto& w : state_) w = detail::splitmix64(root);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t label() const { return label_; }

  // Child stream for sub-task `label`; independent of this stream's own
  // output position (pure function of (seed, label) lineage).
  RandomStream derive(std::uint64_t label) const {
    return RandomStream(detail::mix64(seed_ ^ detail::mix64(label_ + 0x632BE59BD9B4E019ull)), label);
  }

  std::uint64_t next_u64() {
    std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  bool next_bool() { return next_u64() >> 63; }

  // Uniform in [0, bound); Lemire's multiply-shift rejection, exact.
  std::uint64_t next_below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform in [0,1) with 53 random bits.
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t seed_;
  std::uint64_t label_;
  std::uint64_t state_[4];
};

}  // namespace satlab
