#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>

#include "fkin/config.hpp"
#include "fkin/io.hpp"
#include "fkin/runner.hpp"

using namespace fkin;
using Catch::Matchers::ContainsSubstring;

static const char* kFullConfig = R"(
schema = 1

[params]
beta = 0.75
alpha = 1.5
gamma = 0.5
nu = 1.0
lambda = 0.5
d = 1

[kernel]
type = "bessel"
tau = 0.8

[grid]
n = 32
L = 8.0
dt = 0.05
nt = 16

[sigma]
type = "linear"
slope = 0.7

[u0]
type = "constant"
value = 1.0

[run]
replicas = 12
seed = 18446744073709551615
out = "artifacts"
method = "walsh"

[analysis]
holder = true
time-lags = [1, 2, 4, 8]
space-lags = [1, 2, 4, 8]
)";

TEST_CASE("full config round trip") {
  const RunConfig cfg = parse_run_config(kFullConfig);
  CHECK(cfg.params.beta == 0.75);
  CHECK(cfg.params.lambda == 0.5);
  CHECK(std::string(cfg.kernel.name()) == "bessel");
  CHECK(cfg.grid.n == 32);
  CHECK(cfg.grid.nt == 16);
  CHECK(cfg.grid.L == 8.0);
  CHECK(std::holds_alternative<LinearSigma>(cfg.sigma.kind));
  CHECK(cfg.u0.name() == "constant");
  CHECK(cfg.seed == 18446744073709551615ull);  // survives as an exact u64
  CHECK(cfg.method == "walsh");
  CHECK(cfg.out == "artifacts");
  CHECK(cfg.analysis.holder);
  CHECK(cfg.analysis.time_lags.size() == 4);
  CHECK(cfg.analysis.covariance_time == 16);  // defaults to the final slice
}

TEST_CASE("defaults fill a minimal config") {
  const RunConfig cfg = parse_run_config("[params]\nbeta = 1.0\nalpha = 2.0\n");
  CHECK(std::string(cfg.kernel.name()) == "white");
  CHECK(cfg.grid.n == 256);
  CHECK(cfg.replicas == 100);
  CHECK(cfg.method == "additive");
  CHECK_FALSE(cfg.analysis.holder);
  CHECK(cfg.analysis.space_lags.size() >= 4);  // grid-derived dyadic ladder
}

TEST_CASE("diagnostics point at the offending line") {
  REQUIRE_THROWS_WITH(parse_run_config("[params]\nbeta = 0.5\nbogus = 1\n"),
                      ContainsSubstring("line 3") && ContainsSubstring("bogus"));
  REQUIRE_THROWS_WITH(parse_run_config("[nonsense]\nx = 1\n"),
                      ContainsSubstring("[nonsense]"));
  REQUIRE_THROWS_WITH(parse_config_text("[params]\nbeta = 0.5\nbeta = 0.6\n"),
                      ContainsSubstring("duplicate"));
  REQUIRE_THROWS_WITH(parse_run_config("schema = 2\n"), ContainsSubstring("schema"));
  REQUIRE_THROWS_WITH(
      parse_run_config("[sigma]\ntype = \"linear\"\n\n[run]\nmethod = \"additive\"\n"),
      ContainsSubstring("constant sigma"));
  REQUIRE_THROWS_WITH(parse_run_config("[params]\nbeta = 1.0\nalpha = 2.0\n"
                                       "[analysis]\ntime-lags = [0, 2, 4, 8]\n"),
                      ContainsSubstring("time-lags"));
  // kernel dimension follows params.d
  const RunConfig c2 = parse_run_config("[kernel]\ntype = \"riesz\"\ndelta = 0.5\n"
                                        "[params]\nd = 2\nbeta = 0.75\nalpha = 1.5\n");
  REQUIRE(c2.kernel.d == 2);
}

TEST_CASE("comments, booleans, and arrays parse") {
  const auto m = parse_config_text(
      "# leading comment\n"
      "schema = 1  ; trailing comment\n"
      "[analysis]\n"
      "holder = true\n"
      "temporal-times = [1.0, 2.5, 10]\n");
  REQUIRE(m.at("analysis").at("holder").boolean);
  REQUIRE(m.at("analysis").at("temporal-times").array.size() == 3);
  REQUIRE(m.at("analysis").at("temporal-times").array[1] == 2.5);
}

TEST_CASE("preflight flags the inadmissible example") {
  const RunConfig cfg = parse_run_config(
      "[params]\nbeta = 0.75\nalpha = 0.5\ngamma = 0.0\nd = 3\n"
      "[kernel]\ntype = \"bessel\"\ntau = 0.1\n");
  const auto checks = preflight(cfg);
  REQUIRE(checks[0].quantity.rfind("hypothesis-1", 0) == 0);
  REQUIRE(checks[0].verdict == Verdict::Violated);
  // 2e + tau with e = (alpha+gamma)/(2 beta), against the bound d
  REQUIRE(checks[0].value == Catch::Approx(0.5 / 0.75 + 0.1).margin(1e-12));
  REQUIRE(checks[0].bound == 3.0);
}

TEST_CASE("preflight passes the heat/white pair and reports the window") {
  const RunConfig cfg = parse_run_config(
      "[params]\nbeta = 1.0\nalpha = 2.0\n[kernel]\ntype = \"white-noise\"\n"
      "[analysis]\nholder = true\n");
  const auto checks = preflight(cfg);
  REQUIRE(checks.size() == 3);
  CHECK(checks[0].verdict == Verdict::Satisfied);
  CHECK(checks[1].quantity.rfind("hypothesis-2", 0) == 0);
  CHECK(checks[1].verdict == Verdict::Satisfied);
  CHECK(checks[1].margin == Catch::Approx(0.5));
  CHECK(checks[2].verdict == Verdict::Satisfied);  // tempered-measure audit
}

TEST_CASE("additive runner reproduces the quadrature variance bit for bit") {
  const RunConfig cfg = parse_run_config(
      "[params]\nbeta = 0.75\nalpha = 1.5\ngamma = 0.5\nlambda = 1.0\n"
      "[kernel]\ntype = \"bessel\"\ntau = 0.8\n"
      "[grid]\nn = 32\nL = 8.0\ndt = 0.05\nnt = 16\n"
      "[u0]\ntype = \"constant\"\nvalue = 1.0\n"
      "[run]\nreplicas = 60\nseed = 4242\nmethod = \"additive\"\n"
      "[analysis]\ncovariance-lags = [0, 1, 4]\n");
  TrackerBundle agg = make_trackers(cfg, true, false, true);
  const auto outs = run_replicas(cfg, agg);
  REQUIRE(outs.summaries.size() == 60);

  KahanSum fm;
  for (const auto& s : outs.summaries) fm.add(s.final_mean);
  const double mean_final = fm.value() / 60.0;
  REQUIRE(mean_final == Catch::Approx(1.0).margin(0.2));  // constant u0 survives

  const double want =
      covariance_rt(cfg.params, cfg.kernel, cfg.grid.horizon(), {0.0});
  const double got = agg.covariance->covariance(0) - mean_final * mean_final;
  const double se = agg.covariance->covariance_stderr(0);
  REQUIRE(std::abs(got - want) < 5 * se + 0.05 * want);

  TrackerBundle agg2 = make_trackers(cfg, true, false, true);
  run_replicas(cfg, agg2);
  std::ostringstream a, b;
  write_moments_csv(a, *agg.moments, cfg.grid);
  write_moments_csv(b, *agg2.moments, cfg.grid);
  REQUIRE(a.str() == b.str());
}

TEST_CASE("recursion path end to end recovers heat regularity") {
  const RunConfig cfg = parse_run_config(
      "[params]\nbeta = 1.0\nalpha = 2.0\nlambda = 1.0\n"
      "[kernel]\ntype = \"white-noise\"\n"
      "[grid]\nn = 128\nL = 8.0\ndt = 0.005\nnt = 64\n"
      "[sigma]\ntype = \"constant\"\nvalue = 1.0\n"
      "[run]\nreplicas = 50\nseed = 7\nmethod = \"walsh\"\n"
      "[analysis]\nholder = true\ntime-lags = [1,2,4,8]\nspace-lags = [1,2,4,8]\n");
  TrackerBundle agg = make_trackers(cfg, false, true, false);
  run_replicas(cfg, agg);
  const auto ft = agg.holder_time->fit(cfg.params);
  const auto fs = agg.holder_space->fit(cfg.params);
  REQUIRE(ft.fitted_slope == Catch::Approx(0.25).margin(0.1));
  REQUIRE(fs.fitted_slope == Catch::Approx(0.5).margin(0.12));
  REQUIRE(ft.verdict == Verdict::Satisfied);
  REQUIRE(fs.verdict == Verdict::Satisfied);
}

TEST_CASE("fixed-point path: recorded contraction and failure mode") {
  const RunConfig cfg = parse_run_config(
      "[params]\nbeta = 0.75\nalpha = 1.5\ngamma = 0.5\nlambda = 0.5\n"
      "[kernel]\ntype = \"bessel\"\ntau = 0.8\n"
      "[grid]\nn = 16\nL = 8.0\ndt = 0.05\nnt = 8\n"
      "[sigma]\ntype = \"linear\"\nslope = 1.0\n"
      "[u0]\ntype = \"constant\"\nvalue = 1.0\n"
      "[run]\nreplicas = 8\nseed = 3\nmethod = \"picard\"\nmax-picard = 12\n"
      "picard-tol = 1e-10\npicard-batch = 4\n");
  TrackerBundle agg = make_trackers(cfg, true, false, false);
  const auto outs = run_replicas(cfg, agg);
  REQUIRE(outs.picard_deltas.size() >= 2);
  for (std::size_t i = 1; i < outs.picard_deltas.size(); ++i)
    REQUIRE(outs.picard_deltas[i] <= outs.picard_deltas[i - 1]);

  RunConfig bad = cfg;
  bad.max_picard = 1;
  TrackerBundle agg2 = make_trackers(bad, false, false, false);
  REQUIRE_THROWS_AS(run_replicas(bad, agg2), NumericalError);
}

TEST_CASE("csv writers: headers and row counts") {
  GridSpec g(1, 8, 2.0, 0.5, 2);
  MomentTracker mt(g);
  Field f;
  f.grid = g;
  f.params = FracParams{};
  f.values.assign(24, 1.5);
  mt.add(f);
  std::ostringstream os;
  write_moments_csv(os, mt, g);
  const std::string s = os.str();
  REQUIRE(s.rfind("t,x,mean,m2,m4,stderr\n", 0) == 0);
  REQUIRE(std::count(s.begin(), s.end(), '\n') == 25);  // header + 3 slices x 8 cells

  std::ostringstream rs;
  write_replicas_csv(rs, {{0, 1.5, 1.5, 2.25}});
  REQUIRE(rs.str().rfind("replica,max_abs,final_mean,final_m2\n", 0) == 0);
}
