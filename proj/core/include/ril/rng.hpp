#pragma once

#include <array>
#include <cstdint>

namespace ril {

// splitmix64 finalizer. Also used as the hash for packed site keys.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden64 = 0x9e3779b97f4a7c15ull;

// xoshiro256++ with a fixed stream-derivation rule.
//
// Every random stream in the repo is keyed by the tuple
// (seed, walk_index, replicate_index):
//
//   h  = mix64(seed + kGolden64 * (walk_index + 1))
//   h  = mix64(h    + kGolden64 * (replicate_index + 1))
//   s[i] = mix64(h + (i + 1) * kGolden64),  i = 0..3
//
// The rule is part of the output contract: reports record it so results
// can be reproduced bit for bit.
class Xoshiro256pp {
 public:
  Xoshiro256pp(std::uint64_t seed, std::uint64_t walk_index,
               std::uint64_t replicate_index) {
    std::uint64_t h = mix64(seed + kGolden64 * (walk_index + 1));
    h = mix64(h + kGolden64 * (replicate_index + 1));
    for (int i = 0; i < 4; ++i) state_[i] = mix64(h + (i + 1) * kGolden64);
    // all-zero state is the one invalid seed of this generator
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
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

  // uniform double in [0, 1), 53 random bits
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static constexpr const char* kStreamRule =
      "xoshiro256++ / splitmix64(seed, walk_index, replicate_index) v1";

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

}  // namespace ril
