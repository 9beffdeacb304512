#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fkin/quadrature.hpp"

using namespace fkin;

TEST_CASE("gk15 is exact on low-degree polynomials") {
  auto cubic = [](double x) { return 3 * x * x * x - x + 2; };
  auto [v, e] = gk15(cubic, -1.0, 2.5);
  // antiderivative 3/4 x^4 - x^2/2 + 2x
  auto F = [](double x) { return 0.75 * x * x * x * x - 0.5 * x * x + 2 * x; };
  REQUIRE(v == Catch::Approx(F(2.5) - F(-1.0)).epsilon(1e-14));
  REQUIRE(e < 1e-10);
}

TEST_CASE("adaptive refinement on standard integrals") {
  auto r1 = integrate_adaptive([](double x) { return std::exp(-x * x); }, -8.0, 8.0,
                               1e-14, 1e-12);
  REQUIRE(r1.converged);
  REQUIRE(r1.value == Catch::Approx(std::sqrt(kPi)).epsilon(1e-12));

  // integrable endpoint singularity
  auto r2 = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                               1e-12, 1e-9);
  REQUIRE(r2.value == Catch::Approx(2.0).epsilon(1e-7));

  auto r3 = integrate_adaptive([](double x) { return std::sin(100 * x); }, 0.0, kPi,
                               1e-13, 1e-11);
  REQUIRE(r3.converged);
  REQUIRE(r3.value == Catch::Approx((1.0 - std::cos(100 * kPi)) / 100.0).margin(1e-11));
}

TEST_CASE("segment breakpoints are respected") {
  // |x| has a kink at zero; seeding the breakpoint keeps it cheap and exact
  auto kink = [](double x) { return std::abs(x); };
  auto r = integrate_segments(kink, {-1.0, 0.0, 2.0}, 1e-14, 1e-13);
  REQUIRE(r.converged);
  REQUIRE(r.value == Catch::Approx(2.5).epsilon(1e-14));
  REQUIRE(r.panels <= 4);
}

TEST_CASE("doubling tail integrates exponential and power decay") {
  auto re = integrate_doubling([](double x) { return std::exp(-x); }, 1.0, 1e-13, 1e-10);
  REQUIRE(re.verdict == TailVerdict::Converged);
  REQUIRE(re.value == Catch::Approx(std::exp(-1.0)).epsilon(1e-9));

  // int_1^inf x^{-3/2} dx = 2, octave ratios settle at 2^{-1/2}
  auto rp = integrate_doubling([](double x) { return std::pow(x, -1.5); }, 1.0, 1e-12,
                               1e-9);
  REQUIRE(rp.verdict == TailVerdict::Converged);
  REQUIRE(rp.extrapolated);
  REQUIRE(rp.value == Catch::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("doubling tail detects divergence") {
  auto rd = integrate_doubling([](double x) { return 1.0 / x; }, 1.0, 1e-12, 1e-9);
  REQUIRE(rd.verdict == TailVerdict::Divergent);
  auto rg = integrate_doubling([](double x) { return std::sqrt(x); }, 1.0, 1e-12, 1e-9);
  REQUIRE(rg.verdict == TailVerdict::Divergent);
}
