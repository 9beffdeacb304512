// Spectral synthesis of the driving noise: white in time, spatially
// homogeneous with the kernel's spectral density. Discrete conventions are
// documented in NORMALIZATION.md; the load-bearing identity is that the
// coefficient variance at bin k is dt * rho(xi_k) * (2L)^{-d}, which makes the
// physical-space increments of the white kernel have per-cell variance dt/dx.
#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "fkin/common.hpp"
#include "fkin/fft.hpp"
#include "fkin/grid.hpp"
#include "fkin/kernels.hpp"
#include "fkin/rng.hpp"

namespace fkin {

// index-aligned basis: u_j = sum_k c_k e^{2 pi i jk/n} per axis, with bin k
// carrying the continuum frequency xi(k). Multiplying c_k by a radial symbol
// and transforming back applies the corresponding Fourier multiplier.
inline std::vector<double> spectral_to_physical(std::vector<cdouble> spec,
                                                const GridSpec& g) {
  fft_nd(spec, g, true);
  const double n_total = static_cast<double>(g.total());
  std::vector<double> out(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) out[i] = spec[i].real() * n_total;
  return out;
}

inline std::vector<cdouble> physical_to_spectral(const std::vector<double>& v,
                                                 const GridSpec& g) {
  std::vector<cdouble> spec(v.begin(), v.end());
  fft_nd(spec, g, false);
  const double inv = 1.0 / static_cast<double>(g.total());
  for (auto& c : spec) c *= inv;
  return spec;
}

struct NoiseSlab {
  GridSpec grid;
  SpectralKernel kernel = SpectralKernel::white_noise();
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  // row-major (nt, n^d): spectral coefficients of W(t_{j+1}) - W(t_j)
  std::vector<cdouble> increments;

  const cdouble* slice(std::size_t j) const { return increments.data() + j * grid.total(); }
  std::vector<double> physical_slice(std::size_t j) const {
    std::vector<cdouble> s(slice(j), slice(j) + grid.total());
    return spectral_to_physical(std::move(s), grid);
  }
};

// Per-bin coefficient variance. Bins where the density is pointwise singular
// (the origin for Riesz; any zero component for the product kernel) carry a
// non-integrable-at-one-node mass and are dropped.
inline double coefficient_variance(const SpectralKernel& k, const GridSpec& g,
                                   std::size_t idx) {
  const Point xi = g.xi_point(idx);
  double rho;
  try {
    rho = spectral_density(k, xi);
  } catch (const ConfigError&) {
    if (k.origin_singular()) return 0.0;
    throw;
  }
  if (!std::isfinite(rho))
    throw ConfigError("synthesize: spectral density not finite at a grid frequency");
  return g.dt * rho * std::pow(2.0 * g.L, -k.d);
}

inline NoiseSlab synthesize(const GridSpec& grid, const SpectralKernel& kernel,
                            std::uint64_t seed, std::uint64_t replica = 0) {
  grid.validate();
  if (kernel.d != grid.d)
    throw ConfigError("synthesize: kernel and grid dimension mismatch");
  const std::size_t nx = grid.total();
  std::vector<double> sd(nx);  // per-bin standard deviation, computed once
  for (std::size_t idx = 0; idx < nx; ++idx)
    sd[idx] = std::sqrt(coefficient_variance(kernel, grid, idx));

  NoiseSlab slab;
  slab.grid = grid;
  slab.kernel = kernel;
  slab.seed = seed;
  slab.replica = replica;
  slab.increments.assign(grid.nt * nx, cdouble{0.0, 0.0});
  for (std::size_t j = 0; j < grid.nt; ++j) {
    GaussianStream gs(seed, replica, j);
    cdouble* c = slab.increments.data() + j * nx;
    for (std::size_t idx = 0; idx < nx; ++idx) {
      const std::size_t partner = grid.conjugate_index(idx);
      if (partner == idx) {
        c[idx] = cdouble{gs.next() * sd[idx], 0.0};
      } else if (idx < partner) {
        const double a = gs.next(), b = gs.next();
        const double half = sd[idx] * std::sqrt(0.5);
        c[idx] = cdouble{a * half, b * half};
        c[partner] = std::conj(c[idx]);
      }
      // idx > partner: already filled when its partner was visited
    }
  }
  return slab;
}

// -------- binary replay dump (header + little-endian complex64 payload) -----

namespace noise_detail {

inline void put_u64(std::FILE* f, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  std::fwrite(b, 1, 8, f);
}
inline void put_f64(std::FILE* f, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  put_u64(f, u);
}
inline std::uint64_t get_u64(std::FILE* f) {
  unsigned char b[8];
  if (std::fread(b, 1, 8, f) != 8) throw ConfigError("noise slab file truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
inline double get_f64(std::FILE* f) {
  const std::uint64_t u = get_u64(f);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace noise_detail

inline void write_noise_slab(const std::string& path, const NoiseSlab& slab) {
  static_assert(std::endian::native == std::endian::little,
                "slab payload is written natively and documented little-endian");
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ConfigError("cannot open noise slab file for writing: " + path);
  std::fwrite("FKNZ", 1, 4, f);
  using namespace noise_detail;
  put_u64(f, 1);  // format version
  put_u64(f, static_cast<std::uint64_t>(slab.grid.d));
  put_u64(f, slab.grid.n);
  put_f64(f, slab.grid.L);
  put_f64(f, slab.grid.dt);
  put_u64(f, slab.grid.nt);
  put_u64(f, slab.seed);
  put_u64(f, slab.replica);
  const std::string tag = slab.kernel.name();
  put_u64(f, tag.size());
  std::fwrite(tag.data(), 1, tag.size(), f);
  std::vector<float> buf(2 * slab.increments.size());
  for (std::size_t i = 0; i < slab.increments.size(); ++i) {
    buf[2 * i] = static_cast<float>(slab.increments[i].real());
    buf[2 * i + 1] = static_cast<float>(slab.increments[i].imag());
  }
  std::fwrite(buf.data(), sizeof(float), buf.size(), f);
  std::fclose(f);
}

// Replayed coefficients are float32-quantized; the header's kernel is stored
// as its display tag only, so the caller supplies the kernel on load.
inline NoiseSlab read_noise_slab(const std::string& path, const SpectralKernel& kernel) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw ConfigError("cannot open noise slab file: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "FKNZ", 4) != 0) {
    std::fclose(f);
    throw ConfigError("not a noise slab file: " + path);
  }
  using namespace noise_detail;
  NoiseSlab slab;
  try {
    if (get_u64(f) != 1) throw ConfigError("unsupported noise slab version");
    slab.grid.d = static_cast<int>(get_u64(f));
    slab.grid.n = get_u64(f);
    slab.grid.L = get_f64(f);
    slab.grid.dt = get_f64(f);
    slab.grid.nt = get_u64(f);
    slab.seed = get_u64(f);
    slab.replica = get_u64(f);
    const std::size_t tag_len = get_u64(f);
    std::string tag(tag_len, '\0');
    if (std::fread(tag.data(), 1, tag_len, f) != tag_len)
      throw ConfigError("noise slab file truncated");
    slab.grid.validate();
    if (kernel.name() != tag)
      throw ConfigError("noise slab was recorded for kernel '" + tag +
                        "', got '" + kernel.name() + "'");
    slab.kernel = kernel;
    const std::size_t count = slab.grid.nt * slab.grid.total();
    std::vector<float> buf(2 * count);
    if (std::fread(buf.data(), sizeof(float), buf.size(), f) != buf.size())
      throw ConfigError("noise slab payload truncated");
    slab.increments.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      slab.increments[i] = cdouble{buf[2 * i], buf[2 * i + 1]};
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
  return slab;
}

}  // namespace fkin
