// Replica orchestration: drives the configured sampling method over replica
// batches, feeding shared statistics trackers. Chunk merging is ordered so a
// given (config, seed, thread count) reproduces bit-identical statistics.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fkin/analysis.hpp"
#include "fkin/config.hpp"
#include "fkin/noise.hpp"
#include "fkin/sim.hpp"

namespace fkin {

struct ReplicaSummary {
  std::uint64_t replica = 0;
  double max_abs = 0;
  double final_mean = 0;
  double final_m2 = 0;
};

struct TrackerBundle {
  std::optional<MomentTracker> moments;
  std::optional<IncrementTracker> holder_time;
  std::optional<IncrementTracker> holder_space;
  std::optional<CovarianceTracker> covariance;

  void add(const Field& f) {
    if (moments) moments->add(f);
    if (holder_time) holder_time->add(f);
    if (holder_space) holder_space->add(f);
    if (covariance) covariance->add(f);
  }
  void merge(const TrackerBundle& o) {
    if (moments) moments->merge(*o.moments);
    if (holder_time) holder_time->merge(*o.holder_time);
    if (holder_space) holder_space->merge(*o.holder_space);
    if (covariance) covariance->merge(*o.covariance);
  }
};

inline TrackerBundle make_trackers(const RunConfig& cfg, bool want_moments,
                                   bool want_holder, bool want_covariance) {
  TrackerBundle b;
  if (want_moments) b.moments.emplace(cfg.grid);
  if (want_holder) {
    b.holder_time.emplace(cfg.grid, Axis::Time, cfg.analysis.time_lags);
    b.holder_space.emplace(cfg.grid, Axis::Space, cfg.analysis.space_lags);
  }
  if (want_covariance)
    b.covariance.emplace(cfg.grid, cfg.analysis.covariance_time,
                         cfg.analysis.covariance_lags);
  return b;
}

struct RunOutputs {
  std::vector<ReplicaSummary> summaries;
  std::vector<double> picard_deltas;  // first batch; empty for other methods
  std::size_t picard_iterations = 0;
};

namespace runner_detail {

inline ReplicaSummary summarize(const Field& f, std::uint64_t replica) {
  ReplicaSummary s;
  s.replica = replica;
  s.max_abs = f.max_abs();
  const double* last = f.slice(f.grid.nt);
  KahanSum m1, m2;
  for (std::size_t x = 0; x < f.grid.total(); ++x) {
    m1.add(last[x]);
    m2.add(last[x] * last[x]);
  }
  s.final_mean = m1.value() / static_cast<double>(f.grid.total());
  s.final_m2 = m2.value() / static_cast<double>(f.grid.total());
  return s;
}

inline void add_scaled(Field& f, const Field& base, double scale) {
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = base.values[i] + scale * f.values[i];
}

}  // namespace runner_detail

// Runs cfg.replicas replicas of the configured method, feeding `agg` (which
// chooses what gets tracked). Parallel chunks merge in index order.
inline RunOutputs run_replicas(const RunConfig& cfg, TrackerBundle& agg) {
  RunOutputs out;
  out.summaries.resize(cfg.replicas);

  if (cfg.method == "picard") {
    const WalshOptions opt{cfg.midpoint_weights, 1e12};
    for (std::size_t lo = 0; lo < cfg.replicas; lo += cfg.picard_batch) {
      const std::size_t hi = std::min(cfg.replicas, lo + cfg.picard_batch);
      std::vector<NoiseSlab> slabs;
      slabs.reserve(hi - lo);
      for (std::size_t r = lo; r < hi; ++r)
        slabs.push_back(synthesize(cfg.grid, cfg.kernel, cfg.seed, r));
      auto res = picard_iterate(cfg.grid, cfg.params, cfg.kernel, cfg.sigma, cfg.u0,
                                slabs, cfg.max_picard, cfg.picard_tol, opt);
      if (!res.converged)
        throw NumericalError("picard did not reach tolerance " +
                             std::to_string(cfg.picard_tol) + " within " +
                             std::to_string(cfg.max_picard) + " iterations");
      if (lo == 0) {
        out.picard_deltas = res.iterates_delta;
        out.picard_iterations = res.iterations;
      }
      for (std::size_t r = lo; r < hi; ++r) {
        agg.add(res.fields[r - lo]);
        out.summaries[r] = runner_detail::summarize(res.fields[r - lo], r);
      }
    }
    return out;
  }

  // additive and walsh sample replicas independently; shared read-only state
  // is built once up front
  std::optional<AdditiveSampler> sampler;
  std::optional<Field> base;
  double noise_scale = 1.0;
  if (cfg.method == "additive") {
    sampler.emplace(cfg.grid, cfg.params, cfg.kernel);
    noise_scale = cfg.params.lambda * std::get<ConstantSigma>(cfg.sigma.kind).c;
    if (cfg.u0.name() != "zero")
      base = smoothed_initial(cfg.grid, cfg.params, cfg.u0);
  }
  const WalshOptions opt{cfg.midpoint_weights, 1e12};

  const std::size_t nthreads = hardware_threads();
  const std::size_t chunk =
      std::max<std::size_t>(1, (cfg.replicas + nthreads - 1) / nthreads);
  const std::size_t nblocks = (cfg.replicas + chunk - 1) / chunk;
  std::vector<TrackerBundle> parts(nblocks, agg);  // empty clones
  parallel_for_blocks(cfg.replicas, chunk,
                      [&](std::size_t block, std::size_t b, std::size_t e) {
                        for (std::size_t r = b; r < e; ++r) {
                          Field f;
                          if (cfg.method == "additive") {
                            f = sampler->sample(cfg.seed, r);
                            if (base) {
                              runner_detail::add_scaled(f, *base, noise_scale);
                            } else if (noise_scale != 1.0) {
                              for (auto& v : f.values) v *= noise_scale;
                            }
                          } else {
                            const NoiseSlab slab =
                                synthesize(cfg.grid, cfg.kernel, cfg.seed, r);
                            f = walsh_recursion(cfg.grid, cfg.params, cfg.kernel,
                                                cfg.sigma, cfg.u0, slab, opt);
                          }
                          parts[block].add(f);
                          out.summaries[r] = runner_detail::summarize(f, r);
                        }
                      });
  for (auto& part : parts) agg.merge(part);
  return out;
}

}  // namespace fkin
