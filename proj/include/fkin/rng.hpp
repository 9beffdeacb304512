// Counter-keyed random streams: every (seed, replica, slice) triple opens an
// independent generator, so parallel schedules cannot change what is drawn.
#pragma once

#include <cmath>
#include <cstdint>

#include "fkin/common.hpp"

namespace fkin {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                             std::uint64_t c = 0) {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64_next(s);
  s ^= a * 0xff51afd7ed558ccdull;
  k ^= splitmix64_next(s);
  s ^= b * 0xc4ceb9fe1a85ec53ull;
  k ^= splitmix64_next(s);
  s ^= c * 0x2545f4914f6cdd1dull;
  k ^= splitmix64_next(s);
  return k;
}

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t key) {
    for (auto& w : s_) w = splitmix64_next(key);
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
  // uniform on (0, 1]
  double uniform_pos() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1p-53; }
  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// standard normal draws via Box-Muller (explicit, so the draw sequence is
// part of the file-format contract rather than an implementation detail)
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t key) : eng_(key) {}
  GaussianStream(std::uint64_t seed, std::uint64_t replica, std::uint64_t slice,
                 std::uint64_t lane = 0)
      : eng_(mix_key(seed, replica, slice, lane)) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = eng_.uniform_pos();
    const double u2 = eng_.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * kPi * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

 private:
  Xoshiro256pp eng_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace fkin
