// Diffusion coefficients: globally Lipschitz maps u -> sigma(u) with a
// declared constant. Custom tabulated functions are admitted only after a
// randomized Lipschitz audit.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "fkin/common.hpp"
#include "fkin/rng.hpp"

namespace fkin {

struct ConstantSigma {
  double c = 1.0;
};
struct LinearSigma {
  double slope = 1.0;
};
struct SaturatingLinearSigma {
  double slope = 1.0;
  double eps = 0.1;  // sigma(u) = slope*u/(1+eps*|u|)
};
// piecewise-linear interpolant of samples on a uniform u-grid, clamped outside
struct TabulatedSigma {
  double u_min = -1.0;
  double u_max = 1.0;
  std::vector<double> values;
};

struct SigmaSpec {
  std::variant<ConstantSigma, LinearSigma, SaturatingLinearSigma, TabulatedSigma> kind;
  double lipschitz_constant = 1.0;

  static SigmaSpec constant(double c) {
    SigmaSpec s;
    s.kind = ConstantSigma{c};
    s.lipschitz_constant = std::max(1.0, std::abs(c));  // |sigma(x)| <= L(1+|x|)
    return s;
  }
  static SigmaSpec linear(double slope) {
    if (!(slope > 0.0)) throw ConfigError("sigma linear: slope must be positive");
    SigmaSpec s;
    s.kind = LinearSigma{slope};
    s.lipschitz_constant = slope;
    return s;
  }
  static SigmaSpec saturating_linear(double slope, double eps) {
    if (!(slope > 0.0) || !(eps >= 0.0))
      throw ConfigError("sigma saturating: need slope > 0 and eps >= 0");
    SigmaSpec s;
    s.kind = SaturatingLinearSigma{slope, eps};
    s.lipschitz_constant = slope;
    return s;
  }
  static SigmaSpec tabulated(double u_min, double u_max, std::vector<double> values,
                             double declared_lipschitz);

  double operator()(double u) const {
    if (const auto* c = std::get_if<ConstantSigma>(&kind)) return c->c;
    if (const auto* l = std::get_if<LinearSigma>(&kind)) return l->slope * u;
    if (const auto* sl = std::get_if<SaturatingLinearSigma>(&kind))
      return sl->slope * u / (1.0 + sl->eps * std::abs(u));
    const auto& t = std::get<TabulatedSigma>(kind);
    const std::size_t m = t.values.size();
    if (u <= t.u_min) return t.values.front();
    if (u >= t.u_max) return t.values.back();
    const double pos = (u - t.u_min) / (t.u_max - t.u_min) * (m - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos), m - 2);
    const double w = pos - static_cast<double>(i);
    return t.values[i] * (1.0 - w) + t.values[i + 1] * w;
  }

  std::string name() const {
    if (std::holds_alternative<ConstantSigma>(kind)) return "constant";
    if (std::holds_alternative<LinearSigma>(kind)) return "linear";
    if (std::holds_alternative<SaturatingLinearSigma>(kind)) return "saturating-linear";
    return "tabulated";
  }
};

// Randomized audit over 1e4 pairs: difference quotient against the declared
// constant, plus the linear-growth consequence |sigma(x)| <= L(1+|x|).
inline void verify_lipschitz(const SigmaSpec& s, double u_lo, double u_hi,
                             std::size_t pairs = 10000) {
  if (!(s.lipschitz_constant > 0.0))
    throw ConfigError("sigma: Lipschitz constant must be positive");
  Xoshiro256pp rng(mix_key(0x5159, 1, 2, 3));
  const double span = u_hi - u_lo;
  for (std::size_t i = 0; i < pairs; ++i) {
    const double a = u_lo + span * rng.uniform();
    const double b = u_lo + span * rng.uniform();
    if (a == b) continue;
    const double quot = std::abs(s(a) - s(b)) / std::abs(a - b);
    if (quot > s.lipschitz_constant * (1.0 + 1e-9))
      throw ConfigError("sigma: sampled difference quotient " + std::to_string(quot) +
                        " exceeds the declared Lipschitz constant");
    if (std::abs(s(a)) > s.lipschitz_constant * (1.0 + std::abs(a)) * (1.0 + 1e-9))
      throw ConfigError("sigma: |sigma(u)| exceeds L(1+|u|) at u=" + std::to_string(a));
  }
}

inline SigmaSpec SigmaSpec::tabulated(double u_min, double u_max,
                                      std::vector<double> values,
                                      double declared_lipschitz) {
  if (!(u_max > u_min)) throw ConfigError("sigma tabulated: need u_max > u_min");
  if (values.size() < 2) throw ConfigError("sigma tabulated: need at least 2 samples");
  SigmaSpec s;
  s.kind = TabulatedSigma{u_min, u_max, std::move(values)};
  s.lipschitz_constant = declared_lipschitz;
  verify_lipschitz(s, u_min - 0.5 * (u_max - u_min), u_max + 0.5 * (u_max - u_min));
  return s;
}

}  // namespace fkin
