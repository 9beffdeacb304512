// Mild-solution samplers. The additive (sigma = 1, u0 = 0) field is sampled
// exactly per spectral mode from its temporal covariance; the nonlinear case
// runs the Walsh history recursion, optionally as a Picard iteration.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fkin/green.hpp"
#include "fkin/grid.hpp"
#include "fkin/noise.hpp"
#include "fkin/sigma.hpp"
#include "fkin/stats.hpp"

namespace fkin {

struct InitialCondition {
  struct Zero {};
  struct ConstantValue {
    double c = 0.0;
  };
  struct Tabulated {
    std::vector<double> values;
  };
  std::variant<Zero, ConstantValue, Tabulated> kind = Zero{};

  static InitialCondition zero() { return {}; }
  static InitialCondition constant(double c) {
    if (!(c >= 0.0) || !std::isfinite(c))
      throw ConfigError("initial condition: constant must be finite and >= 0");
    InitialCondition u;
    u.kind = ConstantValue{c};
    return u;
  }
  static InitialCondition tabulated(std::vector<double> values) {
    for (double v : values)
      if (!std::isfinite(v) || v < 0.0)
        throw ConfigError("initial condition: samples must be finite and >= 0");
    InitialCondition u;
    u.kind = Tabulated{std::move(values)};
    return u;
  }

  std::vector<double> on_grid(const GridSpec& g) const {
    if (std::holds_alternative<Zero>(kind))
      return std::vector<double>(g.total(), 0.0);
    if (const auto* c = std::get_if<ConstantValue>(&kind))
      return std::vector<double>(g.total(), c->c);
    const auto& t = std::get<Tabulated>(kind);
    if (t.values.size() != g.total())
      throw ConfigError("initial condition: tabulated size does not match the grid");
    return t.values;
  }
  std::string name() const {
    if (std::holds_alternative<Zero>(kind)) return "zero";
    if (std::holds_alternative<ConstantValue>(kind)) return "constant";
    return "tabulated";
  }
};

struct Field {
  std::vector<double> values;  // row-major (nt+1, n^d); slice i is time i*dt
  GridSpec grid;
  FracParams params;
  std::string provenance;

  double* slice(std::size_t i) { return values.data() + i * grid.total(); }
  const double* slice(std::size_t i) const { return values.data() + i * grid.total(); }
  double max_abs() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

namespace sim_detail {

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* who) {
  if (a.d != b.d || a.n != b.n || a.L != b.L || a.dt != b.dt || a.nt != b.nt)
    throw ConfigError(std::string(who) + ": grid mismatch with the noise slab");
}

// per-mode operator symbol |xi_k|^alpha (1+|xi_k|^2)^{gamma/2}
inline std::vector<double> mode_symbols(const GridSpec& g, const FracParams& p) {
  std::vector<double> q(g.total());
  for (std::size_t idx = 0; idx < g.total(); ++idx)
    q[idx] = p.spatial_symbol(g.xi_norm(idx));
  return q;
}

// per-mode spectral measure weight v_k = rho(xi_k) (2L)^{-d}, singular bins 0
inline std::vector<double> mode_weights(const GridSpec& g, const SpectralKernel& k) {
  std::vector<double> v(g.total());
  for (std::size_t idx = 0; idx < g.total(); ++idx)
    v[idx] = coefficient_variance(k, g, idx) / g.dt;
  return v;
}

inline void check_finite(const Field& f, const char* who) {
  for (double v : f.values)
    if (!std::isfinite(v)) throw NumericalError(std::string(who) + ": non-finite value");
}

}  // namespace sim_detail

// (G u0)(t_i) for every saved time: spectral multiply by the propagator.
inline Field smoothed_initial(const GridSpec& grid, const FracParams& params,
                              const InitialCondition& u0) {
  grid.validate();
  params.validate();
  if (params.d != grid.d) throw ConfigError("smoothed_initial: dimension mismatch");
  const std::size_t nx = grid.total();
  Field f;
  f.grid = grid;
  f.params = params;
  f.provenance = "smoothed-initial";
  f.values.assign((grid.nt + 1) * nx, 0.0);
  const std::vector<double> base = u0.on_grid(grid);
  std::copy(base.begin(), base.end(), f.slice(0));
  const auto spec0 = physical_to_spectral(base, grid);
  const auto q = sim_detail::mode_symbols(grid, params);
  auto tab = MlTable::get(params.beta);
  std::vector<cdouble> work(nx);
  for (std::size_t i = 1; i <= grid.nt; ++i) {
    const double s = params.nu * std::pow(grid.t(i), params.beta);
    for (std::size_t k = 0; k < nx; ++k) work[k] = spec0[k] * (*tab)(s * q[k]);
    const auto phys = spectral_to_physical(std::move(work), grid);
    std::copy(phys.begin(), phys.end(), f.slice(i));
    work.assign(nx, cdouble{});
  }
  return f;
}

// ---------------------------------------------------------------------------
// Additive case: per-mode temporal covariance
//   B_q(i,j) = int_0^{min(t_i,t_j)} E(-nu (t_i-s)^b q) E(-nu (t_j-s)^b q) ds,
// factored once per distinct symbol value and reused across replicas.
class AdditiveSampler {
 public:
  AdditiveSampler(const GridSpec& grid, const FracParams& params,
                  const SpectralKernel& kernel)
      : grid_(grid), params_(params), kernel_(kernel) {
    grid_.validate();
    params_.validate();
    if (params_.d != grid_.d || kernel_.d != grid_.d)
      throw ConfigError("additive sampler: dimension mismatch");
    if (!check_hypothesis(kernel_, dalang_exponent(params_)).satisfied())
      throw AdmissibilityError(
          "additive sampler: spectral measure fails the integrability hypothesis");
    q_ = sim_detail::mode_symbols(grid_, params_);
    vk_ = sim_detail::mode_weights(grid_, kernel_);

    // group modes by symbol value
    std::map<double, std::uint32_t> classes;
    class_of_.resize(q_.size());
    for (std::size_t idx = 0; idx < q_.size(); ++idx) {
      const auto it =
          classes.emplace(q_[idx], static_cast<std::uint32_t>(classes.size())).first;
      class_of_[idx] = it->second;
    }
    std::vector<double> class_q(classes.size());
    for (const auto& [q, c] : classes) class_q[c] = q;

    const std::size_t nt = grid_.nt;
    chol_.resize(classes.size());
    wavg_.resize(classes.size());
    auto tab = MlTable::get(params_.beta);
    parallel_for_blocks(classes.size(), 1, [&](std::size_t, std::size_t begin,
                                               std::size_t end) {
      for (std::size_t c = begin; c < end; ++c) {
        const double q = class_q[c];
        const double dt = grid_.dt;
        auto e = [&](double u) { return (*tab)(params_.nu * std::pow(u, params_.beta) * q); };
        // panel integrals P(delta, l) = int_{l dt}^{(l+1) dt} e(u + delta dt) e(u) du
        std::vector<double> panels(nt * nt);
        for (std::size_t delta = 0; delta < nt; ++delta)
          for (std::size_t l = 0; l + delta < nt; ++l) {
            auto f = [&](double u) { return e(u + static_cast<double>(delta) * dt) * e(u); };
            panels[delta * nt + l] =
                integrate_adaptive(f, l * dt, (l + 1) * dt, 1e-14, 1e-9, 200).value;
          }
        const std::size_t m = nt + 1;
        std::vector<double> cov(m * m, 0.0);
        for (std::size_t i = 1; i <= nt; ++i)
          for (std::size_t j = i; j <= nt; ++j) {
            const std::size_t delta = j - i;
            if (delta >= nt) continue;
            double s = 0;
            for (std::size_t l = 0; l < i; ++l) s += panels[delta * nt + l];
            cov[i * m + j] = cov[j * m + i] = s;
          }
        cholesky_inplace(cov, m);
        chol_[c] = std::move(cov);
        // panel-average propagator weights for slab-driven sampling
        std::vector<double> w(nt + 1, 0.0);
        for (std::size_t l = 1; l <= nt; ++l)
          w[l] = integrate_adaptive(e, (l - 1) * dt, l * dt, 1e-14, 1e-9, 200).value / dt;
        wavg_[c] = std::move(w);
      }
    });
  }

  // exact draw of the additive field path at the saved times
  Field sample(std::uint64_t seed, std::uint64_t replica = 0) const {
    const std::size_t nx = grid_.total(), nt = grid_.nt, m = nt + 1;
    std::vector<cdouble> spec(m * nx, cdouble{});
    std::vector<double> za(nt), zb(nt), wa(m), wb(m);
    for (std::size_t idx = 0; idx < nx; ++idx) {
      if (vk_[idx] == 0.0) continue;
      const std::size_t partner = grid_.conjugate_index(idx);
      if (partner < idx) continue;
      const double* L = chol_[class_of_[idx]].data();
      GaussianStream gs(seed, replica, idx, /*lane=*/1);  // lane 0 is the slab synth
      if (partner == idx) {
        for (std::size_t i = 0; i < nt; ++i) za[i] = gs.next();
        lower_apply(L, m, za, wa);
        const double s = std::sqrt(vk_[idx]);
        for (std::size_t i = 1; i <= nt; ++i) spec[i * nx + idx] = cdouble{s * wa[i], 0.0};
      } else {
        for (std::size_t i = 0; i < nt; ++i) {
          za[i] = gs.next();
          zb[i] = gs.next();
        }
        lower_apply(L, m, za, wa);
        lower_apply(L, m, zb, wb);
        const double s = std::sqrt(0.5 * vk_[idx]);
        for (std::size_t i = 1; i <= nt; ++i) {
          const cdouble c{s * wa[i], s * wb[i]};
          spec[i * nx + idx] = c;
          spec[i * nx + partner] = std::conj(c);
        }
      }
    }
    return assemble("additive-exact", std::move(spec));
  }

  // conditional-mean reconstruction from a noise slab's increments
  Field sample_from_slab(const NoiseSlab& slab) const {
    sim_detail::require_same_grid(grid_, slab.grid, "additive sampler");
    if (slab.kernel.name() != kernel_.name())
      throw ConfigError("additive sampler: slab kernel mismatch");
    const std::size_t nx = grid_.total(), nt = grid_.nt, m = nt + 1;
    std::vector<cdouble> spec(m * nx, cdouble{});
    for (std::size_t idx = 0; idx < nx; ++idx) {
      if (vk_[idx] == 0.0) continue;
      const double* w = wavg_[class_of_[idx]].data();
      for (std::size_t i = 1; i <= nt; ++i) {
        cdouble acc{};
        for (std::size_t j = 0; j < i; ++j)
          acc += w[i - j] * slab.increments[j * nx + idx];
        spec[i * nx + idx] = acc;
      }
    }
    return assemble("additive-slab", std::move(spec));
  }

  const GridSpec& grid() const { return grid_; }

  // marginal variance of the field at time index i (diagnostic / oracle hook)
  double variance(std::size_t i, std::size_t mode_subsample = 1) const {
    const std::size_t m = grid_.nt + 1;
    double v = 0;
    for (std::size_t idx = 0; idx < q_.size(); idx += mode_subsample) {
      const double* L = chol_[class_of_[idx]].data();
      double row2 = 0;
      for (std::size_t k = 0; k <= i; ++k) row2 += L[i * m + k] * L[i * m + k];
      v += vk_[idx] * row2;
    }
    return v;
  }

 private:
  static void cholesky_inplace(std::vector<double>& a, std::size_t n) {
    double scale = 0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, a[i * n + i]);
    const double floor_ = std::max(scale, 1e-300) * 1e-14;
    for (std::size_t j = 0; j < n; ++j) {
      double d = a[j * n + j];
      for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
      d = std::max(d, floor_);
      const double root = std::sqrt(d);
      a[j * n + j] = root;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = a[i * n + j];
        for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
        a[i * n + j] = s / root;
      }
      for (std::size_t i = 0; i < j; ++i) a[i * n + j] = 0.0;
    }
  }
  // w = L z with z indexed by time rows 1..nt (row 0 of L is zero)
  static void lower_apply(const double* L, std::size_t m, const std::vector<double>& z,
                          std::vector<double>& w) {
    w.assign(m, 0.0);
    for (std::size_t i = 1; i < m; ++i) {
      double s = 0;
      for (std::size_t k = 1; k <= i; ++k) s += L[i * m + k] * z[k - 1];
      w[i] = s;
    }
  }

  Field assemble(const char* provenance, std::vector<cdouble>&& spec) const {
    const std::size_t nx = grid_.total(), m = grid_.nt + 1;
    Field f;
    f.grid = grid_;
    f.params = params_;
    f.provenance = provenance;
    f.values.assign(m * nx, 0.0);
    for (std::size_t i = 1; i < m; ++i) {
      std::vector<cdouble> s(spec.begin() + i * nx, spec.begin() + (i + 1) * nx);
      const auto phys = spectral_to_physical(std::move(s), grid_);
      std::copy(phys.begin(), phys.end(), f.slice(i));
    }
    sim_detail::check_finite(f, "additive sampler");
    return f;
  }

  GridSpec grid_;
  FracParams params_;
  SpectralKernel kernel_;
  std::vector<double> q_, vk_;
  std::vector<std::uint32_t> class_of_;
  std::vector<std::vector<double>> chol_;  // per class: (nt+1)^2 lower factor
  std::vector<std::vector<double>> wavg_;  // per class: lag-indexed panel means
};

inline Field sample_additive(const GridSpec& grid, const FracParams& params,
                             const SpectralKernel& kernel, std::uint64_t seed,
                             std::uint64_t replica = 0) {
  return AdditiveSampler(grid, params, kernel).sample(seed, replica);
}

// ---------------------------------------------------------------------------
// Walsh recursion for the nonlinear equation: history sum of propagator
// weights against sigma(u) times the noise increments.
struct WalshOptions {
  bool midpoint_weights = true;  // left-endpoint lag behind this flag
  double blowup_guard = 1e12;
};

namespace sim_detail {

// propagator weight table M[l][k] = E(-nu ((l - 1/2) dt)^b q_k), l = 1..nt
inline std::vector<std::vector<double>> weight_table(const GridSpec& g,
                                                     const FracParams& p,
                                                     const std::vector<double>& q,
                                                     bool midpoint) {
  auto tab = MlTable::get(p.beta);
  std::vector<std::vector<double>> M(g.nt + 1);
  for (std::size_t l = 1; l <= g.nt; ++l) {
    const double lag = (static_cast<double>(l) - (midpoint ? 0.5 : 0.0)) * g.dt;
    const double s = p.nu * std::pow(lag, p.beta);
    M[l].resize(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) M[l][k] = (*tab)(s * q[k]);
  }
  return M;
}

struct WalshWorkspace {
  GridSpec grid;
  FracParams params;
  std::vector<double> q;
  std::vector<std::vector<double>> weights;
  std::vector<cdouble> gu0_spec;  // spectral coefficients of u0
  std::vector<double> u0_phys;

  WalshWorkspace(const GridSpec& g, const FracParams& p, const SpectralKernel& k,
                 const InitialCondition& u0, bool midpoint)
      : grid(g), params(p) {
    g.validate();
    p.validate();
    if (p.d != g.d || k.d != g.d) throw ConfigError("walsh: dimension mismatch");
    if (!check_hypothesis(k, dalang_exponent(p)).satisfied())
      throw AdmissibilityError(
          "walsh: spectral measure fails the integrability hypothesis");
    q = mode_symbols(g, p);
    weights = weight_table(g, p, q, midpoint);
    u0_phys = u0.on_grid(g);
    gu0_spec = physical_to_spectral(u0_phys, g);
  }

  // deterministic part (G u0)(t_i) in spectral form
  std::vector<cdouble> smoothed_spec(std::size_t i) const {
    auto tab = MlTable::get(params.beta);
    const double s = params.nu * std::pow(grid.t(i), params.beta);
    std::vector<cdouble> out(gu0_spec.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = gu0_spec[k] * (*tab)(s * q[k]);
    return out;
  }
};

}  // namespace sim_detail

inline Field walsh_recursion(const GridSpec& grid, const FracParams& params,
                             const SpectralKernel& kernel, const SigmaSpec& sigma,
                             const InitialCondition& u0, const NoiseSlab& noise,
                             const WalshOptions& opt = {}) {
  sim_detail::require_same_grid(grid, noise.grid, "walsh");
  sim_detail::WalshWorkspace ws(grid, params, kernel, u0, opt.midpoint_weights);
  const std::size_t nx = grid.total(), nt = grid.nt;
  Field f;
  f.grid = grid;
  f.params = params;
  f.provenance = "walsh-recursion";
  f.values.assign((nt + 1) * nx, 0.0);
  std::copy(ws.u0_phys.begin(), ws.u0_phys.end(), f.slice(0));

  std::vector<std::vector<cdouble>> s_hist;  // S_j = F(sigma(u_j) dW_j)
  s_hist.reserve(nt);
  std::vector<double> prod(nx);
  for (std::size_t m = 1; m <= nt; ++m) {
    // sigma of the previous level against its noise increment
    {
      const double* u_prev = f.slice(m - 1);
      const auto dw = noise.physical_slice(m - 1);
      for (std::size_t i = 0; i < nx; ++i) prod[i] = sigma(u_prev[i]) * dw[i];
      s_hist.push_back(physical_to_spectral(prod, grid));
    }
    auto acc = ws.smoothed_spec(m);
    for (std::size_t j = 0; j < m; ++j) {
      const auto& w = ws.weights[m - j];
      const auto& s = s_hist[j];
      for (std::size_t k = 0; k < nx; ++k) acc[k] += params.lambda * w[k] * s[k];
    }
    const auto phys = spectral_to_physical(std::move(acc), grid);
    std::copy(phys.begin(), phys.end(), f.slice(m));
    double mx = 0;
    for (double v : phys) mx = std::max(mx, std::abs(v));
    if (!(mx <= opt.blowup_guard))
      throw NumericalError("walsh: moment blow-up suspected (|u| exceeded " +
                           std::to_string(opt.blowup_guard) + ")");
  }
  return f;
}

// ---------------------------------------------------------------------------
// Picard iteration of the mild-form map over a batch of replicas sharing the
// iterate count. iterates_delta[n] = sup over (t,x) of the batch mean of
// |u^{(n+1)} - u^{(n)}|^2.
struct PicardResult {
  std::vector<Field> fields;  // final iterate, one per slab
  std::vector<double> iterates_delta;
  std::size_t iterations = 0;
  bool converged = false;
};

inline PicardResult picard_iterate(const GridSpec& grid, const FracParams& params,
                                   const SpectralKernel& kernel, const SigmaSpec& sigma,
                                   const InitialCondition& u0,
                                   const std::vector<NoiseSlab>& noise,
                                   std::size_t k_max, double tol,
                                   const WalshOptions& opt = {}) {
  if (noise.empty()) throw ConfigError("picard: need at least one noise slab");
  for (const auto& slab : noise)
    sim_detail::require_same_grid(grid, slab.grid, "picard");
  sim_detail::WalshWorkspace ws(grid, params, kernel, u0, opt.midpoint_weights);
  const std::size_t nx = grid.total(), nt = grid.nt, R = noise.size();

  // iterate 0: the smoothed initial condition, identical across replicas
  Field base;
  base.grid = grid;
  base.params = params;
  base.provenance = "picard-iterate 0";
  base.values.assign((nt + 1) * nx, 0.0);
  std::copy(ws.u0_phys.begin(), ws.u0_phys.end(), base.slice(0));
  for (std::size_t i = 1; i <= nt; ++i) {
    const auto phys = spectral_to_physical(ws.smoothed_spec(i), grid);
    std::copy(phys.begin(), phys.end(), base.slice(i));
  }
  std::vector<Field> cur(R, base), next(R, base);

  PicardResult out;
  std::size_t stall = 0;
  for (std::size_t n = 0; n < k_max; ++n) {
    std::vector<double> mean_sq((nt + 1) * nx, 0.0);
    parallel_for_blocks(R, 1, [&](std::size_t, std::size_t begin, std::size_t end) {
      std::vector<double> prod(nx);
      for (std::size_t r = begin; r < end; ++r) {
        std::vector<std::vector<cdouble>> s_hist;
        s_hist.reserve(nt);
        for (std::size_t j = 0; j < nt; ++j) {
          const double* u_j = cur[r].slice(j);
          const auto dw = noise[r].physical_slice(j);
          for (std::size_t i = 0; i < nx; ++i) prod[i] = sigma(u_j[i]) * dw[i];
          s_hist.push_back(physical_to_spectral(prod, grid));
        }
        for (std::size_t m = 1; m <= nt; ++m) {
          auto acc = ws.smoothed_spec(m);
          for (std::size_t j = 0; j < m; ++j) {
            const auto& w = ws.weights[m - j];
            const auto& s = s_hist[j];
            for (std::size_t k = 0; k < nx; ++k) acc[k] += params.lambda * w[k] * s[k];
          }
          const auto phys = spectral_to_physical(std::move(acc), grid);
          std::copy(phys.begin(), phys.end(), next[r].slice(m));
        }
      }
    });
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t i = 0; i < mean_sq.size(); ++i) {
        const double dlt = next[r].values[i] - cur[r].values[i];
        mean_sq[i] += dlt * dlt;
      }
    double sup = 0;
    for (double v : mean_sq) sup = std::max(sup, v / static_cast<double>(R));
    out.iterates_delta.push_back(sup);
    std::swap(cur, next);
    out.iterations = n + 1;
    const double guard = opt.blowup_guard;
    for (const auto& fr : cur)
      if (!(fr.max_abs() <= guard))
        throw NumericalError("picard: moment blow-up suspected");
    if (sup < tol) {
      out.converged = true;
      break;
    }
    const std::size_t nd = out.iterates_delta.size();
    if (nd >= 2 && out.iterates_delta[nd - 1] >= out.iterates_delta[nd - 2]) {
      if (++stall >= 3)
        throw NumericalError(
            "picard: iterates_delta failed to decrease for 3 consecutive steps");
    } else {
      stall = 0;
    }
  }
  for (std::size_t r = 0; r < R; ++r) {
    cur[r].provenance = "picard-iterate " + std::to_string(out.iterations);
    sim_detail::check_finite(cur[r], "picard");
  }
  out.fields = std::move(cur);
  return out;
}

inline std::pair<Field, std::vector<double>> picard_iterate(
    const GridSpec& grid, const FracParams& params, const SpectralKernel& kernel,
    const SigmaSpec& sigma, const InitialCondition& u0, const NoiseSlab& noise,
    std::size_t k_max, double tol, const WalshOptions& opt = {}) {
  auto res = picard_iterate(grid, params, kernel, sigma, u0,
                            std::vector<NoiseSlab>{noise}, k_max, tol, opt);
  return {std::move(res.fields.front()), std::move(res.iterates_delta)};
}

}  // namespace fkin
