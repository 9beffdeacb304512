#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fkin/sim.hpp"

using namespace fkin;

namespace {
FracParams heat_params() {
  FracParams p;
  p.beta = 1.0;
  p.alpha = 2.0;
  p.gamma = 0.0;
  p.nu = 1.0;
  p.d = 1;
  return p;
}
}  // namespace

TEST_CASE("deterministic smoothing of initial data") {
  const FracParams heat = heat_params();
  GridSpec g(1, 256, 8.0, 0.02, 32);

  const auto f1 = smoothed_initial(g, heat, InitialCondition::constant(1.0));
  for (double v : f1.values) REQUIRE(v == 1.0);

  std::vector<double> bump(g.n);
  for (std::size_t j = 0; j < g.n; ++j) bump[j] = std::exp(-g.x(j) * g.x(j));
  const auto f2 = smoothed_initial(g, heat, InitialCondition::tabulated(bump));
  double mean0 = 0, meanT = 0;
  for (std::size_t j = 0; j < g.n; ++j) {
    mean0 += f2.slice(0)[j];
    meanT += f2.slice(32)[j];
  }
  REQUIRE(meanT == Catch::Approx(mean0).epsilon(1e-10));

  // gaussian bump under the heat flow: exact periodic-free profile in the
  // central half of the box (images enter at the 1e-8 level near the edge)
  const double t = g.t(32);
  for (std::size_t j = g.n / 4; j < 3 * g.n / 4; j += 7) {
    const double x = g.x(j);
    const double want = std::exp(-x * x / (1 + 4 * t)) / std::sqrt(1 + 4 * t);
    REQUIRE(f2.slice(32)[j] == Catch::Approx(want).margin(1e-10));
  }
}

TEST_CASE("additive exact sampler: determinism and heat variance") {
  const FracParams heat = heat_params();
  GridSpec g(1, 256, 8.0, 1.0 / 64, 64);
  AdditiveSampler sampler(g, heat, SpectralKernel::white_noise());

  REQUIRE(sampler.sample(1, 0).slice(0)[5] == 0.0);
  const auto f = sampler.sample(1, 0);
  const auto f2 = sampler.sample(1, 0);
  REQUIRE(f.values == f2.values);

  const std::size_t xj = 37;
  double s2 = 0, s4 = 0;
  const int R = 4000;
  for (int r = 0; r < R; ++r) {
    const double u = sampler.sample(99, r).slice(g.nt)[xj];
    s2 += u * u;
    s4 += u * u * u * u;
  }
  s2 /= R;
  s4 /= R;
  const double closed = std::sqrt(1.0 / (2 * kPi));  // Var u(1,x) = sqrt(t/2pi)
  const double se = std::sqrt((s4 - s2 * s2) / R);
  REQUIRE(std::abs(s2 - closed) < 5 * se);
  const double discrete = sampler.variance(g.nt);
  REQUIRE(discrete == Catch::Approx(closed).epsilon(0.01));
  REQUIRE(std::abs(s2 - discrete) < 5 * se);
  const double kurt = s4 / (s2 * s2) - 3.0;
  REQUIRE(std::abs(kurt) < 5 * std::sqrt(24.0 / R));
}

TEST_CASE("fractional sampler variance tracks the mode-energy quadrature") {
  FracParams p;
  p.beta = 0.75;
  p.alpha = 1.5;
  p.gamma = 0.5;
  p.nu = 1.0;
  p.d = 1;
  GridSpec g(1, 256, 10.0, 0.02, 50);
  const auto k = SpectralKernel::bessel(1, 0.8);
  AdditiveSampler sampler(g, p, k);
  const double discrete = sampler.variance(g.nt);
  auto tab = MlTable::get(p.beta);
  auto f = [&](double r) { return green_detail::nt_core(p, 1.0, r, *tab, 1e-9); };
  const double cont =
      std::pow(2 * kPi, -1) * radial_measure_integral(k, f, 1e-12, 1e-8).value;
  REQUIRE(discrete == Catch::Approx(cont).epsilon(0.05));
}

TEST_CASE("recursion with lambda=0 is the deterministic smoothing") {
  FracParams p;
  p.beta = 0.75;
  p.alpha = 1.5;
  p.gamma = 0.5;
  p.nu = 1.0;
  p.lambda = 0.0;
  p.d = 1;
  GridSpec g(1, 64, 6.0, 0.02, 25);
  const auto k = SpectralKernel::bessel(1, 1.0);
  std::vector<double> bump(g.n);
  for (std::size_t j = 0; j < g.n; ++j) bump[j] = std::exp(-g.x(j) * g.x(j));
  const auto u0 = InitialCondition::tabulated(bump);
  const auto slab = synthesize(g, k, 7, 0);
  const auto w = walsh_recursion(g, p, k, SigmaSpec::linear(1.0), u0, slab);
  const auto det = smoothed_initial(g, p, u0);
  for (std::size_t i = 0; i < w.values.size(); ++i)
    REQUIRE(w.values[i] == Catch::Approx(det.values[i]).margin(1e-13));
}

TEST_CASE("recursion converges to the slab-driven exact solution as dt -> 0") {
  FracParams p = heat_params();
  p.lambda = 1.0;
  const auto k = SpectralKernel::white_noise();
  const auto sigma = SigmaSpec::constant(1.0);
  const auto u0 = InitialCondition::zero();
  double diffs[2];
  const std::size_t nts[2] = {16, 64};
  for (int c = 0; c < 2; ++c) {
    GridSpec g(1, 128, 6.0, 0.5 / double(nts[c]), nts[c]);
    const auto slab = synthesize(g, k, 11, 0);
    const auto w = walsh_recursion(g, p, k, sigma, u0, slab);
    AdditiveSampler sampler(g, p, k);
    const auto a = sampler.sample_from_slab(slab);
    double err = 0;
    for (std::size_t i = 0; i < w.values.size(); ++i)
      err = std::max(err, std::abs(w.values[i] - a.values[i]));
    diffs[c] = err;
  }
  REQUIRE(diffs[1] < diffs[0]);
}

TEST_CASE("fixed-point iteration") {
  FracParams p;
  p.beta = 0.75;
  p.alpha = 1.5;
  p.gamma = 0.5;
  p.nu = 1.0;
  p.lambda = 0.5;
  p.d = 1;
  GridSpec g(1, 64, 6.0, 0.02, 25);
  const auto k = SpectralKernel::bessel(1, 1.0);
  const auto u0 = InitialCondition::constant(1.0);

  SECTION("constant sigma fixes after one step") {
    const auto slab = synthesize(g, k, 21, 0);
    const auto [fc, dc] =
        picard_iterate(g, p, k, SigmaSpec::constant(1.0), u0, slab, 4, 0.0);
    REQUIRE(dc.size() >= 2);
    REQUIRE(dc[1] == 0.0);
  }

  SECTION("linear sigma contracts monotonically") {
    std::vector<NoiseSlab> slabs;
    for (int r = 0; r < 16; ++r) slabs.push_back(synthesize(g, k, 33, r));
    const auto res =
        picard_iterate(g, p, k, SigmaSpec::linear(1.0), u0, slabs, 6, 1e-14);
    REQUIRE(res.iterates_delta.size() >= 5);
    for (std::size_t n = 2; n < res.iterates_delta.size(); ++n)
      REQUIRE(res.iterates_delta[n] < res.iterates_delta[n - 1]);
  }

  SECTION("fixed point coincides with the one-pass recursion") {
    const auto slab = synthesize(g, k, 33, 0);
    const auto w = walsh_recursion(g, p, k, SigmaSpec::linear(1.0), u0, slab);
    const auto full =
        picard_iterate(g, p, k, SigmaSpec::linear(1.0), u0, slab, g.nt + 1, 1e-30);
    double err = 0, norm_w = 0;
    for (std::size_t i = 0; i < w.values.size(); ++i) {
      err += (full.first.values[i] - w.values[i]) * (full.first.values[i] - w.values[i]);
      norm_w += w.values[i] * w.values[i];
    }
    REQUIRE(std::sqrt(err / norm_w) < 1e-12);
  }
}

TEST_CASE("sigma evaluations and the Lipschitz audit") {
  REQUIRE(SigmaSpec::constant(2.0)(5.0) == 2.0);
  REQUIRE(SigmaSpec::linear(0.5)(3.0) == 1.5);
  const auto sat = SigmaSpec::saturating_linear(1.0, 0.1);
  REQUIRE(sat(0.0) == 0.0);
  REQUIRE(sat(10.0) == Catch::Approx(10.0 / 2.0));

  const auto tab = SigmaSpec::tabulated(-1.0, 1.0, {0.0, 0.5, 1.0}, 1.0);
  REQUIRE(tab(-1.0) == Catch::Approx(0.0));
  REQUIRE(tab(0.0) == Catch::Approx(0.5));
  REQUIRE(tab(1.0) == Catch::Approx(1.0));
  REQUIRE(tab(0.5) == Catch::Approx(0.75));
  REQUIRE(tab(-9.0) == Catch::Approx(0.0));  // clamped outside the table

  // declaring a constant smaller than the table's true slope gets caught
  REQUIRE_THROWS_AS(SigmaSpec::tabulated(-1.0, 1.0, {0.0, 0.5, 1.0}, 0.1),
                    ConfigError);
}
