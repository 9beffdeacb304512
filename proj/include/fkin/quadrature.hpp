// Adaptive Gauss-Kronrod quadrature and doubling-interval tail integration.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "fkin/common.hpp"

namespace fkin {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK values).
namespace gk_detail {
inline constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWeightsK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWeightsG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace gk_detail

// Returns {integral estimate, error estimate} for one panel.
template <class F>
std::pair<double, double> gk15(F&& f, double a, double b) {
  using namespace gk_detail;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kNodes[i]);
    fv[14 - i] = f(c + h * kNodes[i]);
  }
  fv[7] = f(c);
  double resk = kWeightsK[7] * fv[7];
  double resg = kWeightsG[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    resk += kWeightsK[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) resg += kWeightsG[i / 2] * (fv[i] + fv[14 - i]);
  }
  const double value = resk * h;
  // QUADPACK-style scaled error estimate, floored by the raw difference.
  double err = std::abs((resk - resg) * h);
  double resabs = 0;
  for (int i = 0; i < 15; ++i) resabs += kWeightsK[i < 8 ? i : 14 - i] * std::abs(fv[i]);
  resabs *= std::abs(h);
  if (resabs > 0 && err > 0) {
    const double scaled = 200.0 * err / resabs;
    err = resabs * std::min(1.0, scaled * std::sqrt(scaled));
  }
  return {value, err};
}

struct QuadSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-9;
  int max_panels = 4000;
};

struct QuadResult {
  double value = 0;
  double abs_err = 0;
  bool converged = false;
  int panels = 0;
};

// Globally adaptive refinement over an initial segmentation: repeatedly
// bisects the worst panel until the total error estimate meets the target.
template <class F>
QuadResult integrate_segments(F&& f, const std::vector<double>& breakpoints,
                              double abs_tol, double rel_tol, int max_panels = 4000) {
  struct Seg {
    double a, b, value, err;
    bool operator<(const Seg& o) const { return err < o.err; }
  };
  std::priority_queue<Seg> heap;
  double total = 0, toterr = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    double a = breakpoints[i], b = breakpoints[i + 1];
    if (!(b > a)) continue;
    auto [v, e] = gk15(f, a, b);
    heap.push({a, b, v, e});
    total += v;
    toterr += e;
  }
  int n = static_cast<int>(heap.size());
  auto target = [&] { return std::max(abs_tol, rel_tol * std::abs(total)); };
  while (toterr > target() && n < max_panels && !heap.empty()) {
    Seg s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (!(s.a < m && m < s.b)) {  // panel at floating-point resolution
      total += 0;                 // keep its contribution, drop from refinement
      toterr -= s.err;
      toterr += s.err * 0.5;      // cannot do better; damp so loop can exit
      continue;
    }
    auto [v1, e1] = gk15(f, s.a, m);
    auto [v2, e2] = gk15(f, m, s.b);
    total += v1 + v2 - s.value;
    toterr += e1 + e2 - s.err;
    heap.push({s.a, m, v1, e1});
    heap.push({m, s.b, v2, e2});
    ++n;
  }
  QuadResult r;
  r.value = total;
  r.abs_err = toterr;
  r.converged = toterr <= target();
  r.panels = n;
  return r;
}

template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                              double rel_tol, int max_panels = 4000) {
  return integrate_segments(std::forward<F>(f), {a, b}, abs_tol, rel_tol, max_panels);
}

enum class TailVerdict { Converged, Divergent, Undecidable };

struct TailResult {
  double value = 0;
  double abs_err = 0;
  TailVerdict verdict = TailVerdict::Undecidable;
  int octaves = 0;
  bool extrapolated = false;
};

// Integrates f over [r0, infinity) by doubling octaves [r0 2^k, r0 2^{k+1}].
// Intended for eventually monotone nonnegative integrands (measure tails).
// A rising stretch alone proves nothing: integrands with a wide plateau
// (mode energies at small times reach out to the saturation radius) grow
// octave over octave before turning, so divergence is declared only when
// growth outlives the whole budget. Once two consecutive octaves clearly
// decay, the remainder is finished exactly under r -> 1/v, whose adaptive
// refinement toward v = 0 integrates any power-law tail without
// extrapolation heuristics.
template <class F>
TailResult integrate_doubling(F&& f, double r0, double abs_tol, double rel_tol,
                              int max_octaves = 40) {
  TailResult out;
  double total = 0, toterr = 0;
  double prev = -1;
  int growing_count = 0, decay_count = 0;
  for (int k = 0; k < max_octaves; ++k) {
    const double a = r0 * std::ldexp(1.0, k), b = r0 * std::ldexp(1.0, k + 1);
    auto seg = integrate_adaptive(f, a, b, abs_tol * 0.1, rel_tol * 0.1, 600);
    total += seg.value;
    toterr += seg.abs_err;
    out.octaves = k + 1;
    const double inc = seg.value;
    if (std::abs(inc) < std::max(abs_tol, rel_tol * std::abs(total)) * 1e-3 &&
        std::abs(inc) < 1e-305 + std::abs(total) * 1e-15) {
      out.value = total;
      out.abs_err = toterr + std::abs(inc);
      out.verdict = TailVerdict::Converged;
      return out;
    }
    if (prev > 0 && inc > 0) {
      const double ratio = inc / prev;
      if (ratio >= 0.9995) {
        ++growing_count;
        decay_count = 0;
      } else {
        growing_count = 0;
        decay_count = ratio <= 0.97 ? decay_count + 1 : 0;
        if (decay_count >= 2) {
          auto sub = [&](double v) { return f(1.0 / v) / (v * v); };
          auto rest = integrate_adaptive(sub, 0.0, 1.0 / b, abs_tol * 0.3,
                                         rel_tol * 0.3, 1200);
          out.value = total + rest.value;
          out.abs_err = toterr + rest.abs_err;
          out.extrapolated = true;
          out.verdict = out.abs_err <= std::max(abs_tol, rel_tol * std::abs(out.value))
                            ? TailVerdict::Converged
                            : TailVerdict::Undecidable;
          return out;
        }
      }
    } else if (prev > 0 && inc <= 0) {
      growing_count = decay_count = 0;
    }
    prev = inc;
  }
  if (growing_count >= 4) {
    out.value = total;
    out.abs_err = toterr;
    out.verdict = TailVerdict::Divergent;
    return out;
  }
  out.value = total;
  out.abs_err = toterr;
  out.verdict = TailVerdict::Undecidable;
  return out;
}

}  // namespace fkin
