// Periodic spatial grid on [-L, L)^d with its dual frequency lattice.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "fkin/common.hpp"

namespace fkin {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct GridSpec {
  int d = 1;
  std::size_t n = 256;  // points per axis, power of two
  double L = 10.0;      // half-width of the box
  double dt = 0.01;     // time step
  std::size_t nt = 128; // number of time steps

  GridSpec() = default;
  GridSpec(int d_, std::size_t n_, double L_) : d(d_), n(n_), L(L_) { validate(); }
  GridSpec(int d_, std::size_t n_, double L_, double dt_, std::size_t nt_)
      : d(d_), n(n_), L(L_), dt(dt_), nt(nt_) {
    validate();
  }

  void validate() const {
    if (d < 1 || d > 3) throw ConfigError("grid: dimension must be 1, 2 or 3");
    if (!is_power_of_two(n) || n < 8)
      throw ConfigError("grid: points per axis must be a power of two, at least 8");
    if (!(L > 0.0)) throw ConfigError("grid: box half-width must be positive");
    if (!(dt > 0.0)) throw ConfigError("grid: time step must be positive");
    if (nt < 1) throw ConfigError("grid: need at least one time step");
  }

  double horizon() const { return dt * static_cast<double>(nt); }
  double t(std::size_t i) const { return dt * static_cast<double>(i); }

  std::size_t total() const {
    std::size_t t = 1;
    for (int i = 0; i < d; ++i) t *= n;
    return t;
  }
  double dx() const { return 2.0 * L / static_cast<double>(n); }
  double dxi() const { return kPi / L; }
  double x(std::size_t j) const { return -L + static_cast<double>(j) * dx(); }

  // signed frequency index for DFT bin k (standard wrap-around order)
  long ks(std::size_t k) const {
    const long half = static_cast<long>(n / 2);
    const long kk = static_cast<long>(k);
    return kk < half ? kk : kk - static_cast<long>(n);
  }
  double xi(std::size_t k) const { return static_cast<double>(ks(k)) * dxi(); }

  // decode a flat row-major index into per-axis indices
  void unflatten(std::size_t idx, std::size_t* out) const {
    for (int i = d - 1; i >= 0; --i) {
      out[i] = idx % n;
      idx /= n;
    }
  }
  Point xi_point(std::size_t idx) const {
    std::size_t sub[3];
    unflatten(idx, sub);
    Point p(d);
    for (int i = 0; i < d; ++i) p[i] = xi(sub[i]);
    return p;
  }
  double xi_norm(std::size_t idx) const {
    std::size_t sub[3];
    unflatten(idx, sub);
    double s = 0;
    for (int i = 0; i < d; ++i) {
      const double v = xi(sub[i]);
      s += v * v;
    }
    return std::sqrt(s);
  }

  // flat index of the frequency -k (Hermitian partner)
  std::size_t conjugate_index(std::size_t idx) const {
    std::size_t sub[3];
    unflatten(idx, sub);
    std::size_t out = 0;
    for (int i = 0; i < d; ++i) {
      const std::size_t neg = sub[i] == 0 ? 0 : n - sub[i];
      out = out * n + neg;
    }
    return out;
  }
  bool self_conjugate(std::size_t idx) const { return conjugate_index(idx) == idx; }
};

}  // namespace fkin
