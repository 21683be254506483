#pragma once

#include <cstdint>
#include <random>

namespace bss {

// splitmix64 step; used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed (per particle, per region, per chain)
// from a master seed. Streams with distinct tags do not collide in practice.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag) {
  std::uint64_t s = master ^ (0xa0761d6478bd642full * (stream_tag + 1));
  const std::uint64_t a = splitmix64(s);
  const std::uint64_t b = splitmix64(s);
  return a ^ (b << 1) ^ (b >> 63);
}

// Deterministic RNG. The C++ standard pins the mt19937_64 sequence, and the
// helpers below replace std::uniform_* distributions (whose output is
// implementation-defined), so identical seeds give identical results on any
// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n). Modulo bias is irrelevant for n << 2^64.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  bool chance(double p) { return next_double() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bss
