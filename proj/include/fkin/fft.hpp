// Iterative radix-2 FFT (power-of-two lengths) with a row-major
// multi-dimensional wrapper. Forward transform is an unnormalized sum;
// the inverse divides by the length per axis.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fkin/common.hpp"
#include "fkin/grid.hpp"

namespace fkin {

using cdouble = std::complex<double>;

inline void fft_inplace(cdouble* a, std::size_t n, bool inverse) {
  if (!is_power_of_two(n)) throw ConfigError("fft: length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const cdouble wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cdouble w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cdouble u = a[i + j];
        const cdouble v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double s = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) a[i] *= s;
  }
}

inline void fft(std::vector<cdouble>& v, bool inverse = false) {
  fft_inplace(v.data(), v.size(), inverse);
}

// transforms each axis of a row-major d-dimensional array with n points per axis
inline void fft_nd(std::vector<cdouble>& v, int d, std::size_t n,
                   bool inverse = false) {
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= n;
  if (v.size() != total) throw ConfigError("fft_nd: size does not match shape");
  if (d == 1) {
    fft_inplace(v.data(), n, inverse);
    return;
  }
  std::vector<cdouble> line(n);
  // axis a has stride n^{d-1-a} in row-major order
  std::size_t stride = total / n;
  for (int axis = 0; axis < d; ++axis) {
    const std::size_t block = stride * n;  // span of one transform line set
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t i = 0; i < n; ++i) line[i] = v[base + off + i * stride];
        fft_inplace(line.data(), n, inverse);
        for (std::size_t i = 0; i < n; ++i) v[base + off + i * stride] = line[i];
      }
    }
    stride /= n;
  }
}

inline void fft_nd(std::vector<cdouble>& v, const GridSpec& g, bool inverse = false) {
  fft_nd(v, g.d, g.n, inverse);
}

}  // namespace fkin
