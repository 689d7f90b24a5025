#pragma once

#include <cstdint>
#include <random>

namespace lgc {

// Deterministic PRNG used everywhere in the simulator. Draws are derived
// from raw mt19937_64 output instead of <random> distributions, whose
// algorithms are implementation-defined; run output must be reproducible
// byte-for-byte from (config, seed).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound). bound must be nonzero.
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % bound;
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 step; used to derive independent per-purpose streams (workload
// vs. policy) from one experiment seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace lgc
