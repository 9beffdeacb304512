// Run configuration: a small sectioned key-value format (TOML-flavored) parsed
// into typed settings, plus the cross-field admissibility preflight. JSON
// front ends can build the same ConfigMap and reuse everything below.
#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fkin/analysis.hpp"
#include "fkin/sim.hpp"

namespace fkin {

struct ConfigValue {
  enum class Kind { Number, String, Boolean, Array };
  Kind kind = Kind::Number;
  double num = 0.0;
  std::string str;
  bool boolean = false;
  std::vector<double> array;
  std::string raw;  // original token; preserves 64-bit integers exactly
  int line = 0;     // 0 when synthesized rather than parsed
};

// section -> key -> value; top-level keys live under ""
using ConfigMap = std::map<std::string, std::map<std::string, ConfigValue>>;

namespace config_detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size();
}

inline ConfigValue parse_value(const std::string& tok, int line) {
  ConfigValue v;
  v.line = line;
  v.raw = tok;
  if (tok.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value");
  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"')
      throw ConfigError("line " + std::to_string(line) + ": unterminated string");
    v.kind = ConfigValue::Kind::String;
    for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
      if (tok[i] == '\\' && i + 2 < tok.size()) {
        ++i;
        v.str += tok[i];
      } else {
        v.str += tok[i];
      }
    }
    return v;
  }
  if (tok.front() == '[') {
    if (tok.back() != ']')
      throw ConfigError("line " + std::to_string(line) + ": unterminated array");
    v.kind = ConfigValue::Kind::Array;
    std::string body = tok.substr(1, tok.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        if (!v.array.empty() || !trim(body).empty())
          throw ConfigError("line " + std::to_string(line) + ": empty array element");
        continue;
      }
      double x;
      if (!parse_number(item, x))
        throw ConfigError("line " + std::to_string(line) + ": array element '" + item +
                          "' is not a number");
      v.array.push_back(x);
    }
    return v;
  }
  if (tok == "true" || tok == "false") {
    v.kind = ConfigValue::Kind::Boolean;
    v.boolean = tok == "true";
    return v;
  }
  if (parse_number(tok, v.num)) {
    v.kind = ConfigValue::Kind::Number;
    return v;
  }
  for (char c : tok) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
          c == '.' || c == '+'))
      throw ConfigError("line " + std::to_string(line) + ": cannot parse value '" + tok +
                        "'");
  }
  v.kind = ConfigValue::Kind::String;
  v.str = tok;
  return v;
}

// strips a trailing comment, respecting quoted strings
inline std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (!in_str && (s[i] == '#' || s[i] == ';')) return s.substr(0, i);
  }
  return s;
}

}  // namespace config_detail

inline ConfigMap parse_config_text(const std::string& text) {
  using namespace config_detail;
  ConfigMap out;
  std::string section;
  std::stringstream ss(text);
  std::string rawline;
  int lineno = 0;
  while (std::getline(ss, rawline)) {
    ++lineno;
    std::string line = trim(strip_comment(rawline));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
      out[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    for (char c : key) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
        throw ConfigError("line " + std::to_string(lineno) + ": bad key '" + key + "'");
    }
    if (out[section].count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key +
                        "' in section [" + section + "]");
    out[section][key] = parse_value(val, lineno);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct AnalysisSettings {
  bool holder = false;
  std::vector<std::size_t> time_lags;        // dyadic up to nt/2 when omitted
  std::vector<std::size_t> space_lags;       // dyadic up to n/4 when omitted
  std::vector<std::size_t> covariance_lags;  // {0,1,2,4,...} below n/2 when omitted
  std::size_t covariance_time = SIZE_MAX;    // defaults to the final step
  double temporal_tau = 0.5;
  std::vector<double> temporal_times{5, 10, 20, 40};
};

inline std::vector<std::size_t> dyadic_lags(std::size_t limit, bool with_zero = false,
                                            std::size_t max_count = 6) {
  std::vector<std::size_t> out;
  if (with_zero) out.push_back(0);
  for (std::size_t l = 1; l <= limit && out.size() < max_count; l *= 2) out.push_back(l);
  return out;
}

struct RunConfig {
  FracParams params;
  SpectralKernel kernel = SpectralKernel::white_noise();
  GridSpec grid{1, 256, 10.0, 0.01, 128};
  SigmaSpec sigma = SigmaSpec::constant(1.0);
  InitialCondition u0 = InitialCondition::zero();
  std::size_t replicas = 100;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string method = "additive";  // additive | walsh | picard
  bool midpoint_weights = true;
  std::size_t max_picard = 8;
  double picard_tol = 1e-6;
  std::size_t picard_batch = 64;
  AnalysisSettings analysis;
};

namespace config_detail {

// typed access over one section with unknown-key detection
class SectionReader {
 public:
  SectionReader(const ConfigMap& m, const std::string& name) : name_(name) {
    auto it = m.find(name);
    if (it != m.end()) sec_ = &it->second;
  }
  bool has(const std::string& key) const { return sec_ && sec_->count(key); }

  double number(const std::string& key, double dflt) {
    const ConfigValue* v = fetch(key);
    if (!v) return dflt;
    if (v->kind != ConfigValue::Kind::Number) fail(key, *v, "a number");
    return v->num;
  }
  std::size_t index(const std::string& key, std::size_t dflt) {
    const ConfigValue* v = fetch(key);
    if (!v) return dflt;
    if (v->kind != ConfigValue::Kind::Number || v->num < 0 ||
        v->num != std::floor(v->num))
      fail(key, *v, "a nonnegative integer");
    return static_cast<std::size_t>(v->num);
  }
  std::uint64_t u64(const std::string& key, std::uint64_t dflt) {
    const ConfigValue* v = fetch(key);
    if (!v) return dflt;
    if (v->kind != ConfigValue::Kind::Number) fail(key, *v, "an integer");
    std::uint64_t out = 0;
    const auto res = std::from_chars(v->raw.data(), v->raw.data() + v->raw.size(), out);
    if (res.ec != std::errc{} || res.ptr != v->raw.data() + v->raw.size())
      fail(key, *v, "an unsigned 64-bit integer");
    return out;
  }
  std::string word(const std::string& key, const std::string& dflt) {
    const ConfigValue* v = fetch(key);
    if (!v) return dflt;
    if (v->kind != ConfigValue::Kind::String) fail(key, *v, "a string");
    return v->str;
  }
  bool flag(const std::string& key, bool dflt) {
    const ConfigValue* v = fetch(key);
    if (!v) return dflt;
    if (v->kind != ConfigValue::Kind::Boolean) fail(key, *v, "true or false");
    return v->boolean;
  }
  std::vector<double> array(const std::string& key, std::vector<double> dflt) {
    const ConfigValue* v = fetch(key);
    if (!v) return dflt;
    if (v->kind != ConfigValue::Kind::Array) fail(key, *v, "an array of numbers");
    return v->array;
  }
  std::vector<std::size_t> indices(const std::string& key, std::vector<std::size_t> dflt) {
    const ConfigValue* v = fetch(key);
    if (!v) return dflt;
    if (v->kind != ConfigValue::Kind::Array) fail(key, *v, "an array of integers");
    std::vector<std::size_t> out;
    for (double x : v->array) {
      if (x < 0 || x != std::floor(x)) fail(key, *v, "nonnegative integers");
      out.push_back(static_cast<std::size_t>(x));
    }
    return out;
  }

  void finish() const {
    if (!sec_) return;
    for (const auto& [key, val] : *sec_) {
      if (!used_.count(key))
        throw ConfigError("line " + std::to_string(val.line) + ": unknown key '" + key +
                          "' in section [" + name_ + "]");
    }
  }

 private:
  const ConfigValue* fetch(const std::string& key) {
    if (!sec_) return nullptr;
    auto it = sec_->find(key);
    if (it == sec_->end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }
  [[noreturn]] void fail(const std::string& key, const ConfigValue& v,
                         const std::string& want) const {
    throw ConfigError("line " + std::to_string(v.line) + ": key '" + key +
                      "' in section [" + name_ + "] must be " + want);
  }
  std::string name_;
  const std::map<std::string, ConfigValue>* sec_ = nullptr;
  std::set<std::string> used_;
};

}  // namespace config_detail

inline RunConfig parse_run_config(const ConfigMap& m) {
  using config_detail::SectionReader;
  static const std::set<std::string> known_sections{"",      "params", "kernel",
                                                    "grid",  "sigma",  "u0",
                                                    "run",   "analysis"};
  for (const auto& [sec, kv] : m) {
    if (!known_sections.count(sec)) {
      const int line = kv.empty() ? 0 : kv.begin()->second.line;
      throw ConfigError("line " + std::to_string(line) + ": unknown section [" + sec +
                        "]");
    }
  }

  RunConfig cfg;

  SectionReader top(m, "");
  const std::size_t schema = top.index("schema", 1);
  if (schema != 1) throw ConfigError("config: unsupported schema version");
  top.finish();

  SectionReader sp(m, "params");
  cfg.params.beta = sp.number("beta", cfg.params.beta);
  cfg.params.alpha = sp.number("alpha", cfg.params.alpha);
  cfg.params.gamma = sp.number("gamma", cfg.params.gamma);
  cfg.params.nu = sp.number("nu", cfg.params.nu);
  cfg.params.lambda = sp.number("lambda", cfg.params.lambda);
  cfg.params.d = static_cast<int>(sp.index("d", cfg.params.d));
  sp.finish();
  cfg.params.validate();

  SectionReader sk(m, "kernel");
  const std::string ktype = sk.word("type", "white-noise");
  if (ktype == "riesz") {
    cfg.kernel = SpectralKernel::riesz(cfg.params.d, sk.number("delta", 0.5));
  } else if (ktype == "bessel") {
    cfg.kernel = SpectralKernel::bessel(cfg.params.d, sk.number("tau", 1.0));
  } else if (ktype == "fractional-product") {
    const auto h = sk.array("hurst", {});
    cfg.kernel = SpectralKernel::fractional_product(h);
  } else if (ktype == "white-noise") {
    cfg.kernel = SpectralKernel::white_noise();
  } else if (ktype == "finite") {
    cfg.kernel = SpectralKernel::finite_measure(cfg.params.d, sk.number("mass", 1.0));
  } else {
    throw ConfigError("kernel type '" + ktype +
                      "' is not one of riesz|bessel|fractional-product|white-noise|finite");
  }
  sk.finish();
  if (cfg.kernel.d != cfg.params.d)
    throw ConfigError("kernel dimension " + std::to_string(cfg.kernel.d) +
                      " does not match params.d = " + std::to_string(cfg.params.d));

  SectionReader sg(m, "grid");
  cfg.grid = GridSpec(cfg.params.d, sg.index("n", 256), sg.number("L", 10.0),
                      sg.number("dt", 0.01), sg.index("nt", 128));
  sg.finish();

  SectionReader ss(m, "sigma");
  const std::string stype = ss.word("type", "constant");
  if (stype == "constant") {
    cfg.sigma = SigmaSpec::constant(ss.number("value", 1.0));
  } else if (stype == "linear") {
    cfg.sigma = SigmaSpec::linear(ss.number("slope", 1.0));
  } else if (stype == "saturating-linear") {
    cfg.sigma =
        SigmaSpec::saturating_linear(ss.number("slope", 1.0), ss.number("eps", 1.0));
  } else if (stype == "tabulated") {
    cfg.sigma = SigmaSpec::tabulated(ss.number("u-min", -1.0), ss.number("u-max", 1.0),
                                     ss.array("values", {}), ss.number("lipschitz", 1.0));
  } else {
    throw ConfigError("sigma type '" + stype +
                      "' is not one of constant|linear|saturating-linear|tabulated");
  }
  ss.finish();

  SectionReader su(m, "u0");
  const std::string utype = su.word("type", "zero");
  if (utype == "zero") {
    cfg.u0 = InitialCondition::zero();
  } else if (utype == "constant") {
    cfg.u0 = InitialCondition::constant(su.number("value", 0.0));
  } else if (utype == "tabulated") {
    cfg.u0 = InitialCondition::tabulated(su.array("values", {}));
  } else {
    throw ConfigError("u0 type '" + utype + "' is not one of zero|constant|tabulated");
  }
  su.finish();
  cfg.u0.on_grid(cfg.grid);  // shape check

  SectionReader sr(m, "run");
  cfg.replicas = sr.index("replicas", cfg.replicas);
  if (cfg.replicas == 0) throw ConfigError("run.replicas must be positive");
  cfg.seed = sr.u64("seed", cfg.seed);
  cfg.out = sr.word("out", cfg.out);
  cfg.method = sr.word("method", cfg.method);
  cfg.midpoint_weights = sr.flag("midpoint-weights", cfg.midpoint_weights);
  cfg.max_picard = sr.index("max-picard", cfg.max_picard);
  cfg.picard_tol = sr.number("picard-tol", cfg.picard_tol);
  cfg.picard_batch = sr.index("picard-batch", cfg.picard_batch);
  sr.finish();
  if (cfg.method != "additive" && cfg.method != "walsh" && cfg.method != "picard")
    throw ConfigError("run.method '" + cfg.method +
                      "' is not one of additive|walsh|picard");
  if (cfg.method == "additive" &&
      !std::holds_alternative<ConstantSigma>(cfg.sigma.kind))
    throw ConfigError("run.method additive requires a constant sigma");
  if (cfg.method == "picard" && (cfg.max_picard == 0 || cfg.picard_batch == 0))
    throw ConfigError("run: picard needs max-picard and picard-batch >= 1");

  SectionReader sa(m, "analysis");
  cfg.analysis.holder = sa.flag("holder", cfg.analysis.holder);
  cfg.analysis.time_lags = sa.indices("time-lags", dyadic_lags(cfg.grid.nt / 2));
  cfg.analysis.space_lags = sa.indices("space-lags", dyadic_lags(cfg.grid.n / 4));
  cfg.analysis.covariance_lags = sa.indices(
      "covariance-lags", dyadic_lags(cfg.grid.n / 2 - 1, true));
  cfg.analysis.covariance_time = sa.index("covariance-time", cfg.grid.nt);
  cfg.analysis.temporal_tau = sa.number("temporal-tau", cfg.analysis.temporal_tau);
  cfg.analysis.temporal_times = sa.array("temporal-times", cfg.analysis.temporal_times);
  sa.finish();
  if (cfg.analysis.covariance_time > cfg.grid.nt)
    throw ConfigError("analysis.covariance-time exceeds the grid");
  for (std::size_t l : cfg.analysis.time_lags)
    if (l == 0 || l > cfg.grid.nt) throw ConfigError("analysis.time-lags out of range");
  for (std::size_t l : cfg.analysis.space_lags)
    if (l == 0 || l >= cfg.grid.n) throw ConfigError("analysis.space-lags out of range");
  for (std::size_t l : cfg.analysis.covariance_lags)
    if (l >= cfg.grid.n / 2)
      throw ConfigError("analysis.covariance-lags must stay below n/2");
  return cfg;
}

inline RunConfig parse_run_config(const std::string& text) {
  return parse_run_config(parse_config_text(text));
}

// Admissibility preflight. Hypothesis 1 (spectral integrability at the
// damping exponent) is always checked; hypothesis 2 (a nonempty smoothing
// window) only when Hölder analysis is requested. A tempered-measure audit
// rides along for the record.
inline std::vector<BoundCheck> preflight(const RunConfig& cfg) {
  std::vector<BoundCheck> out;
  BoundCheck h1 = check_hypothesis(cfg.kernel, dalang_exponent(cfg.params));
  h1.quantity = "hypothesis-1 " + h1.quantity;
  out.push_back(h1);

  if (cfg.analysis.holder) {
    BoundCheck h2;
    h2.quantity = "hypothesis-2 smoothing-window";
    h2.route = CheckRoute::ClosedForm;
    h2.value = integrability_threshold(cfg.kernel);
    h2.bound = dalang_exponent(cfg.params);
    h2.margin = h2.bound - h2.value;
    h2.verdict = h2.margin > 0 ? Verdict::Satisfied : Verdict::Violated;
    h2.detail = "need the integrability threshold strictly below the damping exponent";
    out.push_back(h2);
  }

  const auto tc = check_tempered(cfg.kernel);
  BoundCheck tm;
  tm.quantity = "measure-tempered";
  tm.route = CheckRoute::Quadrature;
  tm.value = tc.m;
  tm.bound = 10;
  tm.margin = tc.tempered ? 1.0 : -1.0;
  tm.verdict = tc.tempered ? Verdict::Satisfied : Verdict::Undecidable;
  tm.detail = "smallest tempering power m = " + std::to_string(tc.m);
  out.push_back(tm);
  return out;
}

}  // namespace fkin
