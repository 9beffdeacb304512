// Command-line front end: mlf eval, check, green l2|nt|increments, simulate,
// analyze holder|moments|covariance|temporal.
//
// Exit codes: 0 ok, 2 config error, 3 admissibility rejection, 4 numerical
// failure, 5 a requested check came back violated.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fkin/config.hpp"
#include "fkin/io.hpp"
#include "fkin/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fkin;

#ifndef FKIN_NORMALIZATION_SHA256
#define FKIN_NORMALIZATION_SHA256 "unavailable"
#endif

namespace {

json check_to_json(const BoundCheck& c) {
  json j;
  j["quantity"] = c.quantity;
  j["value"] = c.value;
  j["bound"] = c.bound;
  j["margin"] = c.margin;
  j["regime"] = c.regime;
  j["route"] = to_string(c.route);
  j["verdict"] = to_string(c.verdict);
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out << body;
}

// converts a JSON document into the sectioned key-value map the parser in
// the library consumes, so both config formats share one schema
void json_into_map(const json& j, ConfigMap& m, const std::string& section) {
  if (!j.is_object()) throw ConfigError("config json: expected an object");
  for (const auto& [key, val] : j.items()) {
    if (val.is_object()) {
      if (!section.empty())
        throw ConfigError("config json: nested section '" + key + "' not allowed");
      json_into_map(val, m, key);
      continue;
    }
    ConfigValue v;
    if (val.is_number()) {
      v.kind = ConfigValue::Kind::Number;
      v.num = val.get<double>();
      v.raw = val.dump();
    } else if (val.is_boolean()) {
      v.kind = ConfigValue::Kind::Boolean;
      v.boolean = val.get<bool>();
      v.raw = val.dump();
    } else if (val.is_string()) {
      v.kind = ConfigValue::Kind::String;
      v.str = val.get<std::string>();
      v.raw = v.str;
    } else if (val.is_array()) {
      v.kind = ConfigValue::Kind::Array;
      for (const auto& e : val) {
        if (!e.is_number())
          throw ConfigError("config json: array '" + key + "' must hold numbers");
        v.array.push_back(e.get<double>());
      }
      v.raw = val.dump();
    } else {
      throw ConfigError("config json: unsupported value for '" + key + "'");
    }
    m[section][key] = std::move(v);
  }
}

ConfigMap load_config_map(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '{') return [&] {
      ConfigMap m;
      json_into_map(json::parse(text), m, "");
      return m;
    }();
    break;
  }
  return parse_config_text(text);
}

struct LoadedConfig {
  std::string text;
  RunConfig cfg;
};

LoadedConfig load_run_config(const std::string& path) {
  LoadedConfig out;
  out.text = read_file(path);
  try {
    out.cfg = parse_run_config(load_config_map(out.text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config json: ") + e.what());
  }
  return out;
}

std::string resolve_out_dir(const std::string& flag_value, const std::string& cfg_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FKIN_OUT"); env && *env) return env;
  return cfg_value;
}

// admissibility gate shared by the computing subcommands
void require_admissible(const std::vector<BoundCheck>& checks) {
  for (const auto& c : checks) {
    if (c.quantity.rfind("hypothesis", 0) == 0 && c.verdict == Verdict::Violated)
      throw AdmissibilityError(c.quantity + " violated: value " + std::to_string(c.value) +
                               " vs bound " + std::to_string(c.bound) +
                               (c.detail.empty() ? "" : "; " + c.detail));
  }
}

void print_check_table(const std::vector<BoundCheck>& checks) {
  std::printf("%-44s %-12s %14s %14s %14s  %s\n", "quantity", "route", "value", "bound",
              "margin", "verdict");
  for (const auto& c : checks) {
    std::printf("%-44s %-12s %14.6g %14.6g %14.6g  %s\n", c.quantity.c_str(),
                to_string(c.route), c.value, c.bound, c.margin, to_string(c.verdict));
  }
}

void emit_checks(const std::vector<BoundCheck>& checks, bool as_json,
                 std::ostream* file_sink) {
  for (const auto& c : checks) {
    const std::string line = check_to_json(c).dump();
    if (file_sink) *file_sink << line << '\n';
    if (as_json) std::cout << line << '\n';
  }
  if (!as_json && !file_sink) print_check_table(checks);
}

json manifest_base(const LoadedConfig& lc, const std::string& subcommand) {
  json m;
  m["schema"] = 1;
  m["tool"] = subcommand;
  m["version"] = kVersion;
  m["normalization_doc_sha256"] = FKIN_NORMALIZATION_SHA256;
  m["config_text"] = lc.text;
  m["seed"] = lc.cfg.seed;
  m["replicas"] = lc.cfg.replicas;
  m["method"] = lc.cfg.method;
  m["threads"] = hardware_threads();
  return m;
}

int exit_code_for_verdicts(const std::vector<BoundCheck>& checks) {
  for (const auto& c : checks)
    if (c.verdict == Verdict::Violated) return 5;
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_mlf_eval(double beta, double x, double tol) {
  const double value = mittag_leffler(beta, x, tol);
  const auto [lower, upper] = mittag_leffler_bounds(beta, x);
  json j;
  j["beta"] = beta;
  j["x"] = x;
  j["value"] = value;
  j["lower"] = lower;
  j["upper"] = upper;
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_check(const std::string& config_path, bool as_json) {
  const LoadedConfig lc = load_run_config(config_path);
  RunConfig cfg = lc.cfg;
  cfg.analysis.holder = true;  // report the smoothing window either way
  auto checks = preflight(cfg);
  if (cfg.kernel.isotropic()) {
    BoundCheck q = check_hypothesis(cfg.kernel, dalang_exponent(cfg.params),
                                    CheckRoute::Quadrature);
    q.quantity = "hypothesis-1 " + q.quantity + " [cross-check]";
    checks.push_back(q);
  }
  if (as_json) {
    for (const auto& c : checks) std::cout << check_to_json(c).dump() << '\n';
  } else {
    print_check_table(checks);
  }
  require_admissible(checks);
  return 0;
}

int cmd_green_l2(const std::string& config_path, double t, bool as_json) {
  const LoadedConfig lc = load_run_config(config_path);
  const FracParams& p = lc.cfg.params;
  BoundCheck c;
  c.quantity = "green-l2-energy";
  c.route = CheckRoute::Quadrature;
  c.regime = p.beta < 0.5 ? "beta<1/2" : (p.beta == 0.5 ? "beta=1/2" : "beta>1/2");
  c.value = green_l2(GreenSymbol{p, t});
  c.bound = l2_bound_constant(p) * std::pow(t, -p.beta * p.d / p.order_sum());
  c.margin = c.bound - c.value;
  c.verdict = c.value <= c.bound ? Verdict::Satisfied : Verdict::Violated;
  std::vector<BoundCheck> checks{c};
  emit_checks(checks, as_json, nullptr);
  return exit_code_for_verdicts(checks);
}

int cmd_green_nt(const std::string& config_path, double t, double xi, bool as_json) {
  const LoadedConfig lc = load_run_config(config_path);
  const FracParams& p = lc.cfg.params;
  BoundCheck c;
  c.quantity = "propagator-energy";
  c.route = CheckRoute::Quadrature;
  c.regime = p.beta < 0.5 ? "beta<1/2" : (p.beta == 0.5 ? "beta=1/2" : "beta>1/2");
  c.value = nt(p, t, xi);
  c.bound = nt_bound(p, t, xi);
  c.margin = c.bound - c.value;
  c.verdict = c.value <= c.bound ? Verdict::Satisfied : Verdict::Violated;
  std::vector<BoundCheck> checks{c};
  emit_checks(checks, as_json, nullptr);
  return exit_code_for_verdicts(checks);
}

int cmd_green_increments(const std::string& config_path, double t, double tprime,
                         double h, bool as_json) {
  const LoadedConfig lc = load_run_config(config_path);
  const FracParams& p = lc.cfg.params;
  const SpectralKernel& k = lc.cfg.kernel;
  std::vector<BoundCheck> checks;
  if (tprime > 0) {
    const auto parts = increment_time_integral(p, k, t, tprime);
    BoundCheck c1;
    c1.quantity = "time-increment-part1";
    c1.route = CheckRoute::Quadrature;
    c1.value = parts.part1;
    c1.bound = increment_time_bound1(p, k, t, tprime);
    c1.margin = c1.bound - c1.value;
    c1.verdict = c1.value <= c1.bound ? Verdict::Satisfied : Verdict::Violated;
    checks.push_back(c1);
    if (p.beta > 0.5) {
      BoundCheck c2;
      c2.quantity = "time-increment-part2";
      c2.route = CheckRoute::Quadrature;
      c2.regime = "beta>1/2";
      c2.value = parts.part2;
      c2.bound = increment_time_bound2(p, k, t, tprime);
      c2.margin = c2.bound - c2.value;
      c2.verdict = c2.value <= c2.bound ? Verdict::Satisfied : Verdict::Violated;
      checks.push_back(c2);
    }
  }
  if (h > 0) {
    BoundCheck cs;
    cs.quantity = "space-increment";
    cs.route = CheckRoute::Quadrature;
    cs.value = increment_space_integral(p, k, t, h);
    cs.bound = increment_space_bound(p, k, t, h);
    cs.margin = cs.bound - cs.value;
    cs.verdict = cs.value <= cs.bound ? Verdict::Satisfied : Verdict::Violated;
    checks.push_back(cs);
  }
  if (checks.empty())
    throw ConfigError("green increments: pass --tprime and/or --h");
  emit_checks(checks, as_json, nullptr);
  return exit_code_for_verdicts(checks);
}

int cmd_simulate(const std::string& config_path, std::size_t replicas_flag,
                 std::int64_t seed_flag, const std::string& out_flag, bool as_json) {
  LoadedConfig lc = load_run_config(config_path);
  json overrides = json::object();
  if (replicas_flag > 0) {
    lc.cfg.replicas = replicas_flag;
    overrides["replicas"] = replicas_flag;
  }
  if (seed_flag >= 0) {
    lc.cfg.seed = static_cast<std::uint64_t>(seed_flag);
    overrides["seed"] = lc.cfg.seed;
  }
  const std::string out_dir = resolve_out_dir(out_flag, lc.cfg.out);

  const auto checks = preflight(lc.cfg);
  require_admissible(checks);

  TrackerBundle agg = make_trackers(lc.cfg, true, false, false);
  const RunOutputs outs = run_replicas(lc.cfg, agg);

  fs::create_directories(out_dir);
  {
    std::ostringstream os;
    write_moments_csv(os, *agg.moments, lc.cfg.grid);
    write_file(fs::path(out_dir) / "moments.csv", os.str());
  }
  {
    std::ostringstream os;
    write_replicas_csv(os, outs.summaries);
    write_file(fs::path(out_dir) / "replicas.csv", os.str());
  }
  json manifest = manifest_base(lc, "simulate");
  manifest["seed"] = lc.cfg.seed;
  manifest["replicas"] = lc.cfg.replicas;
  manifest["overrides"] = overrides;
  manifest["outputs"] = json::array({"moments.csv", "replicas.csv"});
  manifest["preflight"] = json::array();
  for (const auto& c : checks) manifest["preflight"].push_back(check_to_json(c));
  if (!outs.picard_deltas.empty()) manifest["picard_deltas"] = outs.picard_deltas;
  write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  if (as_json) std::cout << manifest.dump() << '\n';
  else std::cout << "wrote " << out_dir << "/{moments.csv,replicas.csv,manifest.json}\n";
  return 0;
}

LoadedConfig load_from_manifest(const std::string& in_dir) {
  const std::string text = read_file((fs::path(in_dir) / "manifest.json").string());
  json m;
  try {
    m = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (!m.contains("config_text"))
    throw ConfigError("manifest: missing config_text; not a simulate output dir?");
  LoadedConfig lc;
  lc.text = m["config_text"].get<std::string>();
  lc.cfg = parse_run_config(load_config_map(lc.text));
  if (m.contains("overrides")) {
    const auto& o = m["overrides"];
    if (o.contains("replicas")) lc.cfg.replicas = o["replicas"].get<std::size_t>();
    if (o.contains("seed")) lc.cfg.seed = o["seed"].get<std::uint64_t>();
  }
  return lc;
}

int cmd_analyze(const std::string& mode, const std::string& in_dir,
                const std::string& out_flag, bool as_json) {
  LoadedConfig lc = load_from_manifest(in_dir);
  const std::string out_dir = resolve_out_dir(out_flag, lc.cfg.out + "-" + mode);
  if (mode == "holder") lc.cfg.analysis.holder = true;
  const auto pre = preflight(lc.cfg);
  require_admissible(pre);

  fs::create_directories(out_dir);
  std::vector<BoundCheck> checks;
  std::ostringstream checks_file;

  if (mode == "moments") {
    TrackerBundle agg = make_trackers(lc.cfg, true, false, false);
    run_replicas(lc.cfg, agg);
    const MomentReport rep = agg.moments->report();
    std::ostringstream os;
    write_growth_csv(os, rep);
    write_file(fs::path(out_dir) / "growth.csv", os.str());
    const LineFit fit = growth_rate(rep);
    json j;
    j["quantity"] = "moment-growth-rate";
    j["slope"] = fit.slope;
    j["slope_stderr"] = fit.slope_stderr;
    j["intercept"] = fit.intercept;
    checks_file << j.dump() << '\n';
    if (as_json) std::cout << j.dump() << '\n';
  } else if (mode == "holder") {
    TrackerBundle agg = make_trackers(lc.cfg, false, true, false);
    run_replicas(lc.cfg, agg);
    for (const auto* tr : {&*agg.holder_time, &*agg.holder_space}) {
      const HolderFit fit = tr->fit(lc.cfg.params);
      const bool is_time = fit.axis == Axis::Time;
      std::ostringstream os;
      write_holder_csv(os, fit);
      write_file(fs::path(out_dir) / (is_time ? "holder_time.csv" : "holder_space.csv"),
                 os.str());
      BoundCheck c;
      c.quantity = is_time ? "holder-time-slope" : "holder-space-slope";
      c.route = CheckRoute::MonteCarlo;
      c.value = fit.fitted_slope;
      c.bound = fit.theoretical_window.second;
      c.margin = c.bound - c.value;
      c.verdict = fit.verdict;
      c.detail = "slope stderr " + std::to_string(fit.slope_stderr);
      checks.push_back(c);
    }
  } else if (mode == "covariance") {
    TrackerBundle agg = make_trackers(lc.cfg, false, false, true);
    run_replicas(lc.cfg, agg);
    const CovarianceTracker& ct = *agg.covariance;
    const double t_cov = lc.cfg.grid.t(lc.cfg.analysis.covariance_time);
    std::vector<double> quad;
    for (std::size_t i = 0; i < ct.lags().size(); ++i) {
      quad.push_back(covariance_rt(lc.cfg.params, lc.cfg.kernel, t_cov,
                                   {ct.lag_physical(i)}));
      BoundCheck c;
      c.quantity = "covariance-lag-" + std::to_string(ct.lags()[i]);
      c.route = CheckRoute::MonteCarlo;
      c.value = ct.covariance(i);
      c.bound = quad.back();
      const double se = ct.covariance_stderr(i);
      c.margin = 5.0 - (se > 0 ? std::abs(c.value - c.bound) / se : 0.0);
      c.verdict = c.margin >= 0 ? Verdict::Satisfied : Verdict::Violated;
      c.detail = "|empirical - quadrature| within 5 stderr";
      checks.push_back(c);
    }
    checks.push_back(ct.stationarity_check());
    checks.push_back(ct.mean_zero_check());
    std::ostringstream os;
    write_covariance_csv(os, ct, quad);
    write_file(fs::path(out_dir) / "covariance.csv", os.str());
  } else if (mode == "temporal") {
    const auto ta =
        temporal_asymptotics(lc.cfg.params, lc.cfg.kernel, lc.cfg.analysis.temporal_tau,
                             lc.cfg.analysis.temporal_times);
    std::ostringstream os;
    write_temporal_csv(os, ta);
    write_file(fs::path(out_dir) / "temporal.csv", os.str());
    json j;
    j["quantity"] = "temporal-asymptote";
    j["tau"] = lc.cfg.analysis.temporal_tau;
    j["limit"] = ta.limit;
    j["covariances"] = ta.covariances;
    checks_file << j.dump() << '\n';
    if (as_json) std::cout << j.dump() << '\n';
  } else {
    throw ConfigError("analyze: mode must be holder|moments|covariance|temporal");
  }

  for (const auto& c : checks) checks_file << check_to_json(c).dump() << '\n';
  write_file(fs::path(out_dir) / "checks.jsonl", checks_file.str());
  if (as_json)
    for (const auto& c : checks) std::cout << check_to_json(c).dump() << '\n';
  return exit_code_for_verdicts(checks);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional stochastic kinetic equation toolkit"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "emit JSON to stdout");

  // mlf eval
  auto* mlf_cmd = app.add_subcommand("mlf", "Mittag-Leffler utilities");
  auto* mlf_eval = mlf_cmd->add_subcommand("eval", "evaluate E_beta(-x) with bounds");
  double beta = 0.5, x = 0.0, tol = 1e-10;
  mlf_eval->add_option("--beta", beta, "order in (0,1]")->required();
  mlf_eval->add_option("--x", x, "nonnegative argument")->required();
  mlf_eval->add_option("--tol", tol, "target accuracy");

  // check
  auto* check_cmd = app.add_subcommand("check", "hypothesis verdicts for a config");
  std::string check_config;
  check_cmd->add_option("--config", check_config, "config file")->required();

  // green
  auto* green_cmd = app.add_subcommand("green", "propagator bound checks");
  std::string green_config;
  double g_t = 1.0, g_tprime = 0.0, g_h = 0.0, g_xi = 0.0;
  auto* green_l2_cmd = green_cmd->add_subcommand("l2", "L2 energy vs bound");
  green_l2_cmd->add_option("--config", green_config, "config file")->required();
  green_l2_cmd->add_option("--t", g_t, "time")->required();
  auto* green_nt_cmd = green_cmd->add_subcommand("nt", "mode energy vs bound");
  green_nt_cmd->add_option("--config", green_config, "config file")->required();
  green_nt_cmd->add_option("--t", g_t, "time")->required();
  green_nt_cmd->add_option("--xi", g_xi, "frequency radius")->required();
  auto* green_inc_cmd =
      green_cmd->add_subcommand("increments", "increment integrals vs bounds");
  green_inc_cmd->set_help_flag("--help", "print help");  // frees -h for the offset
  green_inc_cmd->add_option("--config", green_config, "config file")->required();
  green_inc_cmd->add_option("--t", g_t, "time")->required();
  green_inc_cmd->add_option("--tprime", g_tprime, "earlier time for the time increment");
  green_inc_cmd->add_option("--h", g_h, "spatial offset for the space increment");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "sample replicas, write CSVs");
  std::string sim_config, sim_out;
  std::size_t sim_replicas = 0;
  std::int64_t sim_seed = -1;
  sim_cmd->add_option("--config", sim_config, "config file")->required();
  sim_cmd->add_option("--replicas", sim_replicas, "override replica count");
  sim_cmd->add_option("--seed", sim_seed, "override seed");
  sim_cmd->add_option("--out", sim_out, "output directory");

  // analyze
  auto* an_cmd = app.add_subcommand("analyze", "statistics over a simulate dir");
  std::string an_mode, an_in, an_out;
  an_cmd->add_option("mode", an_mode, "holder|moments|covariance|temporal")->required();
  an_cmd->add_option("--in", an_in, "simulate output directory")->required();
  an_cmd->add_option("--out", an_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (mlf_eval->parsed()) return cmd_mlf_eval(beta, x, tol);
    if (check_cmd->parsed()) return cmd_check(check_config, as_json);
    if (green_l2_cmd->parsed()) return cmd_green_l2(green_config, g_t, as_json);
    if (green_nt_cmd->parsed()) return cmd_green_nt(green_config, g_t, g_xi, as_json);
    if (green_inc_cmd->parsed())
      return cmd_green_increments(green_config, g_t, g_tprime, g_h, as_json);
    if (sim_cmd->parsed())
      return cmd_simulate(sim_config, sim_replicas, sim_seed, sim_out, as_json);
    if (an_cmd->parsed()) return cmd_analyze(an_mode, an_in, an_out, as_json);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const AdmissibilityError& e) {
    std::cerr << "admissibility: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 4;
  }
}
