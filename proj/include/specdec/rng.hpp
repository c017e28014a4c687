#pragma once

#include <cstdint>

namespace specdec {

// Seedable, splittable random stream: xoshiro256++ state derived from
// (seed, stream_id) through SplitMix64. The same (seed, stream_id) always
// reproduces the same draw sequence; distinct stream ids give statistically
// independent streams. Single-owner: parallel trials each take their own
// stream via derive().
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {
    std::uint64_t x = mix64(seed + 0x9e3779b97f4a7c15ULL) ^ mix64(stream_id + 0xd1b54a32d192ed03ULL);
    for (auto& word : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      word = mix64(x);
    }
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

  // Uniform double in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, n). n must be > 0; desk-scale n, modulo bias is
  // negligible against 2^64.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Independent child stream; deterministic in (seed, stream_id, child_id).
  RngStream derive(std::uint64_t child_id) const {
    return RngStream(seed_, mix64(stream_ + 0x2545f4914f6cdd1dULL) ^ mix64(child_id));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  // SplitMix64 finalizer.
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace specdec
