// Plain-text emission: CSV tables with pinned formatting so identical runs
// produce identical bytes.
#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "fkin/analysis.hpp"
#include "fkin/runner.hpp"

namespace fkin {

inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// aggregate per-cell moments; x is the physical coordinate in d=1, the
// flattened index otherwise
inline void write_moments_csv(std::ostream& os, const MomentTracker& mt,
                              const GridSpec& g) {
  os << "t,x,mean,m2,m4,stderr\n";
  for (std::size_t i = 0; i <= g.nt; ++i) {
    for (std::size_t j = 0; j < g.total(); ++j) {
      const auto& a = mt.cell(i, j);
      const double xcol = g.d == 1 ? g.x(j) : static_cast<double>(j);
      os << fmt_g17(g.t(i)) << ',' << fmt_g17(xcol) << ',' << fmt_g17(a.mean()) << ','
         << fmt_g17(a.m2()) << ',' << fmt_g17(a.m4()) << ',' << fmt_g17(a.m2_stderr())
         << '\n';
    }
  }
}

inline void write_replicas_csv(std::ostream& os,
                               const std::vector<ReplicaSummary>& rows) {
  os << "replica,max_abs,final_mean,final_m2\n";
  for (const auto& r : rows) {
    os << r.replica << ',' << fmt_g17(r.max_abs) << ',' << fmt_g17(r.final_mean) << ','
       << fmt_g17(r.final_m2) << '\n';
  }
}

inline void write_holder_csv(std::ostream& os, const HolderFit& fit) {
  os << "axis,lag,m2\n";
  const char* ax = fit.axis == Axis::Time ? "time" : "space";
  for (std::size_t i = 0; i < fit.lags.size(); ++i)
    os << ax << ',' << fmt_g17(fit.lags[i]) << ',' << fmt_g17(fit.m2_increments[i])
       << '\n';
}

inline void write_covariance_csv(std::ostream& os, const CovarianceTracker& ct,
                                 const std::vector<double>& quadrature) {
  os << "lag,empirical,stderr,quadrature\n";
  for (std::size_t i = 0; i < ct.lags().size(); ++i) {
    os << fmt_g17(ct.lag_physical(i)) << ',' << fmt_g17(ct.covariance(i)) << ','
       << fmt_g17(ct.covariance_stderr(i)) << ','
       << fmt_g17(i < quadrature.size() ? quadrature[i] : 0.0) << '\n';
  }
}

inline void write_temporal_csv(std::ostream& os, const TemporalAsymptotics& ta) {
  os << "t,covariance,limit\n";
  for (std::size_t i = 0; i < ta.times.size(); ++i)
    os << fmt_g17(ta.times[i]) << ',' << fmt_g17(ta.covariances[i]) << ','
       << fmt_g17(ta.limit) << '\n';
}

inline void write_growth_csv(std::ostream& os, const MomentReport& r) {
  os << "t,sup_m2,stderr\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    os << fmt_g17(r.times[i]) << ',' << fmt_g17(r.sup_m2[i]) << ','
       << fmt_g17(r.sup_stderr[i]) << '\n';
}

}  // namespace fkin
