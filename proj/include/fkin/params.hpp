// Equation parameters: fractional time order, spatial operator exponents,
// diffusivity, noise intensity, spatial dimension.
#pragma once

#include <cmath>

#include "fkin/common.hpp"

namespace fkin {

struct FracParams {
  double beta = 0.75;   // time order, (0,1]
  double alpha = 1.5;   // fractional Laplacian order, (0,2]
  double gamma = 0.0;   // Bessel regularization order, [0,2]
  double nu = 1.0;      // diffusivity, > 0
  double lambda = 1.0;  // noise intensity, >= 0
  int d = 1;            // spatial dimension, >= 1

  void validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("params: beta must lie in (0,1]");
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("params: alpha must lie in (0,2]");
    if (!(gamma >= 0.0 && gamma <= 2.0)) throw ConfigError("params: gamma must lie in [0,2]");
    if (!(nu > 0.0)) throw ConfigError("params: nu must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("params: lambda must be nonnegative");
    if (d < 1) throw ConfigError("params: d must be a positive integer");
  }

  double order_sum() const { return alpha + gamma; }

  // Symbol of the spatial operator at radius r: r^alpha (1+r^2)^{gamma/2}.
  double spatial_symbol(double r) const {
    return std::pow(r, alpha) * std::pow(1.0 + r * r, 0.5 * gamma);
  }
};

}  // namespace fkin
