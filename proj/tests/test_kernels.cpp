#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fkin/kernels.hpp"

using namespace fkin;

TEST_CASE("unit-ball masses against closed forms") {
  // riesz d=1 delta=1/2: 2 * int_0^1 r^{-1/2} dr = 4
  REQUIRE(measure_ball_mass(SpectralKernel::riesz(1, 0.5)) ==
          Catch::Approx(4.0).margin(1e-9));
  REQUIRE(measure_ball_mass(SpectralKernel::white_noise()) ==
          Catch::Approx(2.0).margin(1e-10));
  // bessel d=2 tau=1: 2 pi (sqrt 2 - 1)
  REQUIRE(measure_ball_mass(SpectralKernel::bessel(2, 1.0)) ==
          Catch::Approx(2 * kPi * (std::sqrt(2.0) - 1.0)).margin(1e-9));
  // product of per-axis masses (2/(2-2H_i)) for H = (.7,.8): box, not ball
  REQUIRE(measure_ball_mass(SpectralKernel::fractional_product({0.7, 0.8})) ==
          Catch::Approx(2.24).margin(1e-12));
  // point mass at the origin scaled by total mass: chi-square radial profile
  REQUIRE(measure_ball_mass(SpectralKernel::finite_measure(2, 3.0)) ==
          Catch::Approx(3 * (1 - std::exp(-0.5))).margin(1e-9));
}

TEST_CASE("tail integrals and weighted radial integrals") {
  const auto wh = SpectralKernel::white_noise();
  auto ti = measure_tail_integral(wh, 1.0);
  REQUIRE(ti.verdict == TailVerdict::Converged);
  REQUIRE(ti.value == Catch::Approx(kPi / 2).margin(1e-9));

  auto gi = radial_measure_integral(wh, [](double r) { return std::exp(-r * r); });
  REQUIRE(gi.value == Catch::Approx(std::sqrt(kPi)).margin(1e-9));

  // riesz d=1 delta=1/2 with gaussian weight: Gamma(1/4) after r^2 = s
  auto gr = radial_measure_integral(SpectralKernel::riesz(1, 0.5),
                                    [](double r) { return std::exp(-r * r); });
  REQUIRE(gr.value == Catch::Approx(std::tgamma(0.25)).margin(1e-8));
}

TEST_CASE("spectral integrability verdicts, closed form vs quadrature") {
  const auto rz = SpectralKernel::riesz(1, 0.5);
  const auto bs2 = SpectralKernel::bessel(2, 1.0);
  const auto wh = SpectralKernel::white_noise();
  const auto fp = SpectralKernel::fractional_product({0.7, 0.8});

  CHECK(check_hypothesis(rz, 0.3).satisfied());
  CHECK_FALSE(check_hypothesis(rz, 0.2).satisfied());
  CHECK(check_hypothesis(rz, 0.3, CheckRoute::Quadrature).satisfied());
  CHECK(check_hypothesis(rz, 0.2, CheckRoute::Quadrature).verdict ==
        Verdict::Violated);

  CHECK(check_hypothesis(bs2, 0.55).satisfied());
  CHECK_FALSE(check_hypothesis(bs2, 0.45).satisfied());
  CHECK(check_hypothesis(bs2, 0.55, CheckRoute::Quadrature).satisfied());
  CHECK(check_hypothesis(bs2, 0.45, CheckRoute::Quadrature).verdict ==
        Verdict::Violated);

  CHECK(check_hypothesis(wh, 0.6).satisfied());
  CHECK_FALSE(check_hypothesis(wh, 0.45).satisfied());

  // product kernel: sum(2H-1) = 1.0 vs d - 2e
  CHECK_FALSE(check_hypothesis(fp, 0.4).satisfied());
  CHECK(check_hypothesis(fp, 0.6).satisfied());

  CHECK(check_hypothesis(SpectralKernel::finite_measure(2, 3.0), 0.01).satisfied());
}

TEST_CASE("integrability threshold pairs with the verdicts") {
  // threshold is the infimum admissible exponent; nudging across it flips
  struct Row {
    SpectralKernel k;
    double want;
  };
  const Row rows[] = {
      {SpectralKernel::riesz(1, 0.5), 0.25},
      {SpectralKernel::bessel(2, 1.0), 0.5},
      {SpectralKernel::white_noise(), 0.5},
      {SpectralKernel::fractional_product({0.7, 0.8}), 0.5},
      {SpectralKernel::finite_measure(2, 3.0), 0.0},
  };
  for (const auto& r : rows) {
    const double e = integrability_threshold(r.k);
    INFO(r.k.name());
    REQUIRE(e == Catch::Approx(r.want).margin(1e-14));
    CHECK(check_hypothesis(r.k, e + 0.01).satisfied());
    if (e > 0) CHECK_FALSE(check_hypothesis(r.k, e - 0.01).satisfied());
  }
}

TEST_CASE("tempered-measure audit") {
  auto t1 = check_tempered(SpectralKernel::riesz(1, 0.5));
  CHECK(t1.tempered);
  CHECK(t1.m == 1);
  CHECK(check_tempered(SpectralKernel::bessel(3, 0.5)).m == 2);
  CHECK(check_tempered(SpectralKernel::finite_measure(2, 3.0)).m == 0);
}

TEST_CASE("damping exponent by time-order regime") {
  FracParams p;
  p.alpha = 1.5;
  p.gamma = 0.5;
  p.beta = 0.3;
  REQUIRE(dalang_exponent(p) == Catch::Approx(2.0).margin(1e-14));
  p.beta = 0.5;
  REQUIRE(dalang_exponent(p) == Catch::Approx(1.0).margin(1e-14));
  p.beta = 0.75;
  REQUIRE(dalang_exponent(p) == Catch::Approx(2.0 / 1.5).margin(1e-14));
  p.beta = 1.0;
  REQUIRE(dalang_exponent(p) == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("riesz-equivalent decay exponent") {
  REQUIRE(*riesz_equivalent_delta(SpectralKernel::bessel(2, 1.0)) == 1.0);
  REQUIRE(*riesz_equivalent_delta(SpectralKernel::riesz(1, 0.5)) == 0.5);
  REQUIRE(*riesz_equivalent_delta(SpectralKernel::white_noise()) == 0.0);
  REQUIRE_FALSE(
      riesz_equivalent_delta(SpectralKernel::fractional_product({0.7, 0.8})));
}

TEST_CASE("constructor guards") {
  REQUIRE_THROWS_AS(SpectralKernel::riesz(1, 1.5), ConfigError);   // delta >= d
  REQUIRE_THROWS_AS(SpectralKernel::riesz(1, -0.1), ConfigError);
  REQUIRE_THROWS_AS(SpectralKernel::bessel(1, -1.0), ConfigError);
  REQUIRE_THROWS_AS(SpectralKernel::fractional_product({0.4}), ConfigError);
  REQUIRE_THROWS_AS(SpectralKernel::fractional_product({}), ConfigError);
  REQUIRE_THROWS_AS(SpectralKernel::finite_measure(1, -2.0), ConfigError);
}
