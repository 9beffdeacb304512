// Shared small types and error taxonomy.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkin {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr char kVersion[] = "0.1.0";

// Exit-code taxonomy used by the CLI: 2 config, 3 admissibility, 4 numerical.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AdmissibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Point = std::vector<double>;

inline double norm2(const Point& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}
inline double norm(const Point& x) { return std::sqrt(norm2(x)); }

enum class Verdict { Satisfied, Violated, Undecidable, NotApplicable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::Undecidable: return "undecidable";
    default: return "not-applicable";
  }
}

enum class CheckRoute { Auto, ClosedForm, Quadrature, MonteCarlo };

inline const char* to_string(CheckRoute r) {
  switch (r) {
    case CheckRoute::ClosedForm: return "closed-form";
    case CheckRoute::Quadrature: return "quadrature";
    case CheckRoute::MonteCarlo: return "monte-carlo";
    default: return "auto";
  }
}

// Outcome of a single inequality or finiteness check. `margin` is
// bound - value for dominance checks, or the distance of the deciding
// variable from its critical threshold for closed-form verdicts.
struct BoundCheck {
  std::string quantity;
  double value = 0;
  double bound = 0;
  double margin = 0;
  std::string regime;
  CheckRoute route = CheckRoute::ClosedForm;
  Verdict verdict = Verdict::Undecidable;
  std::string detail;

  bool satisfied() const { return verdict == Verdict::Satisfied; }
};

// 64-bit FNV-1a, used for golden-value regressions and manifest doc hashes.
inline std::uint64_t fnv1a64(const void* data, std::size_t bytes,
                             std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}
inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

}  // namespace fkin
