#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fkin/green.hpp"

using namespace fkin;

namespace {
FracParams heat_params() {
  FracParams p;
  p.beta = 1.0;
  p.alpha = 2.0;
  p.gamma = 0.0;
  return p;
}
}  // namespace

TEST_CASE("fourier symbol closed forms") {
  const GreenSymbol gh(heat_params(), 1.0);
  REQUIRE(fourier_green(gh, 1.0) == Catch::Approx(std::exp(-1.0)).margin(1e-11));
  REQUIRE(fourier_green(gh, 0.0) == 1.0);

  FracParams p51;
  p51.beta = 0.5;
  p51.alpha = 1.0;
  p51.gamma = 1.0;
  // at beta=1/2 the symbol is exp(z^2) erfc(z) with z = nu t^{1/2} Psi(xi)
  REQUIRE(fourier_green(GreenSymbol(p51, 1.0), 1.0) ==
          Catch::Approx(std::exp(2.0) * std::erfc(std::sqrt(2.0))).margin(2e-10));
}

TEST_CASE("physical-space values against the heat kernel") {
  const GreenSymbol gh(heat_params(), 1.0);
  GridSpec g(1, 512, 12.0);
  REQUIRE(green_physical(gh, {0.0}, g) ==
          Catch::Approx(0.28209479177387814347).margin(1e-10));
  REQUIRE(green_physical(gh, {2.0}, g) ==
          Catch::Approx(0.10377687435514867584).margin(1e-10));

  FracParams p51;
  p51.beta = 0.5;
  p51.alpha = 1.0;
  p51.gamma = 1.0;
  const GreenSymbol g51(p51, 1.0);
  REQUIRE(green_physical(g51, {1.3}, g) ==
          Catch::Approx(green_physical(g51, {-1.3}, g)).margin(1e-14));
  // the certified tail bound must cover the mass gained by extending the
  // frequency box, and shrink like reach^{d-alpha-gamma} when it grows 8x
  const auto coarse = green_physical_with_tail(g51, {0.0}, g);
  const auto fine = green_physical_with_tail(g51, {0.0}, GridSpec(1, 4096, 12.0));
  REQUIRE(std::abs(fine.value - coarse.value) <= coarse.tail_bound);
  REQUIRE(fine.tail_bound == Catch::Approx(coarse.tail_bound / 8.0).epsilon(1e-12));
}

TEST_CASE("L2 energy: heat closed form, scaling, and bound") {
  const GreenSymbol gh(heat_params(), 1.0);
  // ||G_1||^2 = 1/sqrt(8 pi)
  REQUIRE(green_l2(gh) == Catch::Approx(0.19947114020071633897).margin(1e-9));
  const GreenSymbol gh2(heat_params(), 2.0);
  REQUIRE(green_l2(gh2) / green_l2(gh) ==
          Catch::Approx(std::pow(2.0, -0.5)).margin(1e-8));

  FracParams p51;
  p51.beta = 0.5;
  p51.alpha = 1.0;
  p51.gamma = 1.0;
  REQUIRE(green_l2(GreenSymbol(p51, 1.0)) <= l2_bound_constant(p51));
  REQUIRE(l2_bound_constant(p51) ==
          Catch::Approx(0.23534906594417870316).margin(1e-14));

  // t^{-beta d/(alpha+gamma)} scaling across regimes
  for (double beta : {0.3, 0.5, 0.75}) {
    FracParams p;
    p.beta = beta;
    p.alpha = 1.2;
    p.gamma = 0.4;
    const double expo = beta * p.d / p.order_sum();
    for (double t : {0.25, 1.0, 4.0}) {
      INFO("beta=" << beta << " t=" << t);
      REQUIRE(green_l2(GreenSymbol(p, t)) <=
              l2_bound_constant(p) * std::pow(t, -expo) * (1 + 1e-9));
    }
  }
}

TEST_CASE("mode energy N_t and its uniform bound") {
  const FracParams heat = heat_params();
  REQUIRE(nt(heat, 3.0, 0.0) == 3.0);
  // int_0^50 e^{-2u} du -> 1/2
  REQUIRE(nt(heat, 50.0, 1.0) == Catch::Approx(0.5).margin(1e-9));

  FracParams pb;
  pb.beta = 0.3;
  pb.alpha = 1.5;
  pb.gamma = 0.5;
  REQUIRE(nt_bound_constant(pb, 1.0) ==
          Catch::Approx(9.0545365072847401915).margin(1e-12));
  FracParams pc;
  pc.beta = 0.5;
  pc.alpha = 1.0;
  pc.gamma = 1.0;
  REQUIRE(nt_bound_constant(pc, 4.0) ==
          Catch::Approx(11.089815403622064109).margin(1e-12));

  for (double beta : {0.3, 0.5, 0.75, 0.95}) {
    FracParams p;
    p.beta = beta;
    p.alpha = 1.2;
    p.gamma = 0.4;
    p.nu = 0.8;
    for (double t : {0.2, 1.0, 5.0})
      for (double r : {0.0, 0.4, 1.0, 2.5, 10.0}) {
        INFO("beta=" << beta << " t=" << t << " r=" << r);
        REQUIRE(nt(p, t, r) <= nt_bound(p, t, r));
      }
  }
}

TEST_CASE("time-increment integral matches the heat closed form") {
  const FracParams heat = heat_params();
  const auto wh = SpectralKernel::white_noise();
  const double t = 1.0, tp = 0.9, tau = t - tp;
  const auto parts = increment_time_integral(heat, wh, t, tp);
  const double part2_want = std::sqrt(tau / (2 * kPi));
  const double sp = std::sqrt(kPi);
  const double part1_want =
      sp / (2 * kPi) *
      (std::sqrt(2.0) * (std::sqrt(t) - std::sqrt(tau)) -
       2.0 * (std::sqrt(t + tp) - std::sqrt(tau)) + std::sqrt(2.0) * std::sqrt(tp));
  REQUIRE(parts.part2 == Catch::Approx(part2_want).epsilon(1e-6));
  REQUIRE(parts.part1 == Catch::Approx(part1_want).epsilon(2e-6));
}

TEST_CASE("time-increment integrals sit below their dominating expressions") {
  const auto rz = SpectralKernel::riesz(1, 0.5);
  FracParams p1;
  p1.beta = 0.75;
  p1.alpha = 1.5;
  p1.gamma = 0.0;
  const auto parts = increment_time_integral(p1, rz, 1.0, 0.9);
  CHECK(parts.part1 <= increment_time_bound1(p1, rz, 1.0, 0.9));
  CHECK(parts.part2 <= increment_time_bound2(p1, rz, 1.0, 0.9));

  FracParams p2;
  p2.beta = 0.3;
  p2.alpha = 1.5;
  p2.gamma = 0.0;
  const auto parts2 = increment_time_integral(p2, rz, 1.0, 0.5);
  CHECK(parts2.part1 <= increment_time_bound1(p2, rz, 1.0, 0.5));
  CHECK(parts2.part2 <= increment_time_bound2(p2, rz, 1.0, 0.5));
}

TEST_CASE("space-increment integral vs heat closed form and bound") {
  const FracParams heat = heat_params();
  const auto wh = SpectralKernel::white_noise();
  const double t = 1.0;
  for (double h : {0.5, 0.1}) {
    const double got = increment_space_integral(heat, wh, t, h);
    auto f = [&](double u) {
      return std::sqrt(kPi / (2 * u)) * (1.0 - std::exp(-h * h / (8 * u)));
    };
    const double want = integrate_adaptive(f, 0.0, t, 1e-13, 1e-11).value / kPi;
    INFO("h=" << h);
    REQUIRE(got == Catch::Approx(want).epsilon(3e-6));
  }
  REQUIRE(increment_space_integral(heat, wh, t, 0.0) == 0.0);

  FracParams p1;
  p1.beta = 0.75;
  p1.alpha = 1.5;
  p1.gamma = 0.0;
  const auto rz = SpectralKernel::riesz(1, 0.5);
  CHECK(increment_space_integral(p1, rz, 1.0, 0.1) <=
        increment_space_bound(p1, rz, 1.0, 0.1));
  // dyadic slope should reach 2 rho or better within a tenth
  const double v4 = increment_space_integral(p1, rz, 1.0, 0.4);
  const double v05 = increment_space_integral(p1, rz, 1.0, 0.05);
  const double slope = std::log(v4 / v05) / std::log(0.4 / 0.05);
  CHECK(slope >= 2 * default_rho(p1) - 0.1);
}

TEST_CASE("exponent helpers split the admissible window") {
  FracParams p;
  p.beta = 0.75;
  p.alpha = 1.5;
  p.gamma = 0.5;
  const double rho_total = dalang_exponent(p);
  const double eta = default_eta(p);
  REQUIRE(eta == Catch::Approx(0.5 * rho_total));
  REQUIRE(default_rho(p) == Catch::Approx(0.5 * (rho_total - eta)));
  REQUIRE(default_rho(p, 0.1) == Catch::Approx(0.5 * (rho_total - 0.1)));
  FracParams tight = p;
  tight.beta = 1.0;  // rho_total = 1
  REQUIRE_THROWS_AS(default_rho(tight, 1.0), AdmissibilityError);
}
