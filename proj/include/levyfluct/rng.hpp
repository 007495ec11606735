#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace levyfluct {

// Per-path random stream: xoshiro256++ seeded through SplitMix64 from a
// (run seed, path id) pair, so path i draws the same numbers no matter
// which worker executes it or in what order.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path_id) {
    std::uint64_t sm = seed ^ (0x9E3779B97F4A7C15ULL * (path_id + 1));
    for (auto& word : s_) {
      sm += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      word = z ^ (z >> 31);
    }
    s_[0] |= 1;  // the all-zero state is absorbing
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on [0, 1)
  double u01() { return (next() >> 11) * 0x1.0p-53; }

  // exponential with the given rate
  double exponential(double rate) { return -std::log1p(-u01()) / rate; }

  // standard normal by Box-Muller, second draw cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log1p(-u01()));
    const double t = 2.0 * std::numbers::pi * u01();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace levyfluct
