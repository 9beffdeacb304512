// Reduction helpers for the Monte Carlo side: compensated accumulation, a
// block-deterministic parallel map-reduce (results independent of thread
// count and scheduling), and least-squares line fits with slope errors.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fkin/common.hpp"

namespace fkin {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// mean / second / fourth moment tracker with merge, enough for m2/m4 reports
struct MomentAccumulator {
  KahanSum s1, s2, s4;
  std::size_t count = 0;
  void add(double x) {
    const double x2 = x * x;
    s1.add(x);
    s2.add(x2);
    s4.add(x2 * x2);
    ++count;
  }
  void merge(const MomentAccumulator& o) {
    s1.add(o.s1.value());
    s2.add(o.s2.value());
    s4.add(o.s4.value());
    count += o.count;
  }
  double mean() const { return count ? s1.value() / count : 0.0; }
  double m2() const { return count ? s2.value() / count : 0.0; }
  double m4() const { return count ? s4.value() / count : 0.0; }
  double variance() const {
    const double m = mean();
    return m2() - m * m;
  }
  // standard error of the m2 estimate itself
  double m2_stderr() const {
    if (count < 2) return 0.0;
    const double v = m4() - m2() * m2();
    return std::sqrt(std::max(v, 0.0) / static_cast<double>(count));
  }
  double mean_stderr() const {
    return count ? std::sqrt(std::max(variance(), 0.0) / static_cast<double>(count))
                 : 0.0;
  }
  // excess kurtosis of a zero-mean-ish sample
  double excess_kurtosis() const {
    const double v = variance();
    return v > 0 ? m4() / (v * v) - 3.0 : 0.0;
  }
};

inline unsigned hardware_threads() {
  if (const char* env = std::getenv("FKIN_THREADS")) {
    const long v = std::atol(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs body(i) for i in [0, count) split into fixed-size blocks; blocks are
// claimed dynamically but identified by index, so any per-block state the
// caller keeps can be merged in block order afterwards for a scheduling-
// independent result.
inline void parallel_for_blocks(
    std::size_t count, std::size_t block_size,
    const std::function<void(std::size_t block, std::size_t begin, std::size_t end)>&
        body) {
  if (count == 0) return;
  if (block_size == 0) block_size = 1;
  const std::size_t nblocks = (count + block_size - 1) / block_size;
  const unsigned nthreads =
      static_cast<unsigned>(std::min<std::size_t>(hardware_threads(), nblocks));
  if (nthreads <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b)
      body(b, b * block_size, std::min(count, (b + 1) * block_size));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (unsigned t = 0; t < nthreads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= nblocks) return;
        try {
          body(b, b * block_size, std::min(count, (b + 1) * block_size));
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

inline LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ConfigError("linear_fit: need at least two matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("linear_fit: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      ss += r * r;
    }
    f.slope_stderr = std::sqrt(ss / (n - 2.0) / sxx);
  }
  return f;
}

}  // namespace fkin
