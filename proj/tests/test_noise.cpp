#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <vector>

#include "fkin/noise.hpp"

using namespace fkin;

TEST_CASE("fft agrees with the direct transform and inverts") {
  std::vector<cdouble> v(16);
  GaussianStream gs(12345, 0, 0);
  for (auto& z : v) z = {gs.next(), gs.next()};
  auto w = v;
  fft(w);
  for (std::size_t k = 0; k < 16; ++k) {
    cdouble s = 0;
    for (std::size_t j = 0; j < 16; ++j)
      s += v[j] * std::polar(1.0, -2 * kPi * double(j * k) / 16.0);
    REQUIRE(std::abs(s - w[k]) < 1e-12);
  }
  fft(w, true);
  for (std::size_t j = 0; j < 16; ++j) REQUIRE(std::abs(w[j] - v[j]) < 1e-13);
}

TEST_CASE("2-d fft: separable impulse response and round trip") {
  const std::size_t n = 8;
  std::vector<cdouble> v(n * n, 0.0);
  v[3 * n + 5] = 1.0;
  auto w = v;
  fft_nd(w, 2, n);
  for (std::size_t k0 = 0; k0 < n; ++k0)
    for (std::size_t k1 = 0; k1 < n; ++k1) {
      const cdouble want =
          std::polar(1.0, -2 * kPi * (3.0 * k0 + 5.0 * k1) / double(n));
      REQUIRE(std::abs(w[k0 * n + k1] - want) < 1e-13);
    }
  fft_nd(w, 2, n, true);
  for (std::size_t i = 0; i < n * n; ++i) REQUIRE(std::abs(w[i] - v[i]) < 1e-13);
}

TEST_CASE("grid frequency layout and conjugate pairing") {
  GridSpec g(1, 16, 4.0);
  REQUIRE(g.dxi() == kPi / 4.0);
  REQUIRE(g.xi(1) == kPi / 4.0);
  REQUIRE(g.xi(15) == -kPi / 4.0);
  REQUIRE(g.xi(8) == -8 * kPi / 4.0);
  REQUIRE(g.conjugate_index(3) == 13);
  REQUIRE(g.conjugate_index(0) == 0);
  REQUIRE(g.self_conjugate(8));
  GridSpec g2(2, 8, 2.0);
  REQUIRE(g2.conjugate_index(1 * 8 + 2) == 62);  // (1,2) -> (7,6)
  REQUIRE_THROWS_AS(GridSpec(1, 12, 4.0), ConfigError);  // not a power of two
  REQUIRE_THROWS_AS(GridSpec(1, 4, 4.0), ConfigError);   // too small
}

TEST_CASE("gaussian stream: determinism, lane separation, moments") {
  GaussianStream a(42, 1, 2), b(42, 1, 2), c(42, 1, 3);
  bool same = true, differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.next(), y = b.next(), z = c.next();
    if (x != y) same = false;
    if (x != z) differs = true;
  }
  REQUIRE(same);
  REQUIRE(differs);

  GaussianStream g(7, 0, 0);
  const int N = 2000000;
  double s = 0, s2 = 0, s3 = 0, s4 = 0;
  for (int i = 0; i < N; ++i) {
    const double x = g.next();
    s += x;
    s2 += x * x;
    s3 += x * x * x;
    s4 += x * x * x * x;
  }
  REQUIRE(std::abs(s / N) < 4e-3);
  REQUIRE(std::abs(s2 / N - 1) < 7e-3);
  REQUIRE(std::abs(s3 / N) < 1.5e-2);
  REQUIRE(std::abs(s4 / N - 3) < 4e-2);
}

TEST_CASE("spectral basis round trip") {
  GridSpec g(1, 16, 3.0, 0.1, 2);
  std::vector<double> v(16);
  for (int i = 0; i < 16; ++i) v[i] = std::sin(0.7 * i) + 0.3 * i;
  const auto spec = physical_to_spectral(v, g);
  const auto back = spectral_to_physical(spec, g);
  for (int i = 0; i < 16; ++i) REQUIRE(back[i] == Catch::Approx(v[i]).margin(1e-12));
}

TEST_CASE("white noise cells carry variance dt/dx") {
  GridSpec g(1, 64, 4.0, 0.01, 4);
  const double want = g.dt / g.dx();
  double s1 = 0, s2 = 0;
  std::size_t cnt = 0;
  for (int r = 0; r < 2000; ++r) {
    const auto slab = synthesize(g, SpectralKernel::white_noise(), 77, r);
    for (std::size_t j = 0; j < g.nt; ++j)
      for (double x : slab.physical_slice(j)) {
        s1 += x;
        s2 += x * x;
        ++cnt;
      }
  }
  const double mean = s1 / cnt;
  const double var = s2 / cnt - mean * mean;
  const double se = want * std::sqrt(2.0 / double(cnt));
  REQUIRE(std::abs(var - want) < 5 * se);
}

TEST_CASE("synthesized slabs: hermitian, deterministic, replica-indexed") {
  GridSpec g(2, 16, 2.0, 0.05, 3);
  const auto k = SpectralKernel::riesz(2, 0.8);
  const auto a = synthesize(g, k, 123, 0);
  for (std::size_t j = 0; j < g.nt; ++j) {
    const cdouble* c = a.slice(j);
    for (std::size_t idx = 0; idx < g.total(); ++idx) {
      const cdouble want = std::conj(c[g.conjugate_index(idx)]);
      REQUIRE(c[idx].real() == want.real());
      REQUIRE(c[idx].imag() == want.imag());
    }
  }
  const auto b = synthesize(g, k, 123, 0);
  REQUIRE(a.increments == b.increments);
  const auto c2 = synthesize(g, k, 123, 1);
  REQUIRE(a.increments != c2.increments);
  // singular spectral density: the origin bin is dropped, not extrapolated
  REQUIRE(a.increments[0] == cdouble{0.0, 0.0});
}

TEST_CASE("consecutive slices are uncorrelated") {
  GridSpec g(1, 32, 4.0, 0.02, 2);
  const auto k = SpectralKernel::bessel(1, 1.2);
  double s_xy = 0, s_xx = 0, s_yy = 0;
  std::size_t cnt = 0;
  for (int r = 0; r < 4000; ++r) {
    const auto slab = synthesize(g, k, 9, r);
    const auto w0 = slab.physical_slice(0);
    const auto w1 = slab.physical_slice(1);
    for (std::size_t i = 0; i < w0.size(); ++i) {
      s_xy += w0[i] * w1[i];
      s_xx += w0[i] * w0[i];
      s_yy += w1[i] * w1[i];
      ++cnt;
    }
  }
  const double corr = s_xy / std::sqrt(s_xx * s_yy);
  REQUIRE(std::abs(corr) < 5.0 / std::sqrt(double(cnt)));
}

TEST_CASE("covariance is translation invariant across anchors") {
  GridSpec g(1, 64, 6.0, 0.05, 1);
  const auto k = SpectralKernel::riesz(1, 0.5);
  const int lag = 5, reps = 20000;
  double c0 = 0, c1 = 0, q0 = 0, q1 = 0;
  for (int r = 0; r < reps; ++r) {
    const auto slab = synthesize(g, k, 4242, r);
    const auto w = slab.physical_slice(0);
    const double p0 = w[3] * w[3 + lag], p1 = w[33] * w[33 + lag];
    c0 += p0;
    c1 += p1;
    q0 += p0 * p0;
    q1 += p1 * p1;
  }
  c0 /= reps;
  c1 /= reps;
  q0 = q0 / reps - c0 * c0;
  q1 = q1 / reps - c1 * c1;
  REQUIRE(std::abs(c0 - c1) < 5 * std::sqrt((q0 + q1) / reps));
}

TEST_CASE("riesz spectral power law shows up in the coefficients") {
  GridSpec g(1, 64, 4.0, 0.01, 1);
  const double delta = 0.7;
  const auto k = SpectralKernel::riesz(1, delta);
  std::vector<double> pow_sum(g.n, 0.0);
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    const auto slab = synthesize(g, k, 5150, r);
    const cdouble* c = slab.slice(0);
    for (std::size_t i = 0; i < g.n; ++i) pow_sum[i] += std::norm(c[i]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 1; i <= 20; ++i) {
    const double lx = std::log(g.xi(i)), ly = std::log(pow_sum[i] / reps);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  REQUIRE(slope == Catch::Approx(-delta).margin(0.05));
}

TEST_CASE("slab files round trip and reject kernel mismatches") {
  GridSpec g(1, 16, 2.0, 0.05, 3);
  const auto k = SpectralKernel::bessel(1, 0.9);
  const auto slab = synthesize(g, k, 31, 2);
  const std::string path = "test_noise_slab.bin";
  write_noise_slab(path, slab);
  const auto rd = read_noise_slab(path, k);
  REQUIRE(rd.seed == 31);
  REQUIRE(rd.replica == 2);
  REQUIRE(rd.grid.n == 16);
  for (std::size_t i = 0; i < slab.increments.size(); ++i)
    REQUIRE(std::abs(rd.increments[i] - slab.increments[i]) < 1e-5);
  REQUIRE_THROWS_AS(read_noise_slab(path, SpectralKernel::riesz(1, 0.5)), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("white noise synthesis is one-dimensional") {
  GridSpec g(2, 16, 2.0, 0.05, 1);
  REQUIRE_THROWS_AS(synthesize(g, SpectralKernel::white_noise(), 1, 0), ConfigError);
}
