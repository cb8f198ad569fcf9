#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace swarm {

namespace detail {
inline uint64_t splitmix64(uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
inline uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
}  // namespace detail

// xoshiro256++ with splitmix64 seeding. All distributions are hand-rolled so
// that identical seeds produce identical streams on every platform and
// standard library. Normal draws use Box-Muller without a cached spare, so
// the full generator state is exactly the four words below.
class Rng {
 public:
  Rng() : Rng(0) {}

  explicit Rng(uint64_t seed) {
    uint64_t s = seed;
    for (auto& w : s_) w = detail::splitmix64(s);
  }

  uint64_t next() {
    const uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). n must be positive.
  int uniform_int(int n) {
    const int v = static_cast<int>(uniform01() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

  // Standard normal via Box-Muller; consumes exactly two draws.
  double normal() {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
  }

  // Derives an independent child stream; deterministic in (state, tag).
  Rng fork(uint64_t tag) const {
    uint64_t s = s_[0] ^ detail::rotl(tag * 0x9e3779b97f4a7c15ULL + 1, 17) ^ s_[2];
    Rng child(0);
    for (auto& w : child.s_) w = detail::splitmix64(s);
    return child;
  }

  std::array<uint64_t, 4> state() const { return s_; }
  void set_state(const std::array<uint64_t, 4>& s) { s_ = s; }

  bool operator==(const Rng& o) const { return s_ == o.s_; }

 private:
  std::array<uint64_t, 4> s_{};
};

// Stable 64-bit mix for deriving per-instance seeds from a master seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t tag) {
  uint64_t s = seed ^ (0x2545f4914f6cdd1dULL * (tag + 1));
  return detail::splitmix64(s);
}

}  // namespace swarm
