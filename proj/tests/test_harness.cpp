#include <doctest.h>

#include <cmath>

#include "crnlab/experiment_config.hpp"
#include "crnlab/harness.hpp"
#include "helpers.hpp"

using namespace crnlab;
using namespace crnlab::test;

namespace {

ScalingSpec regime_a_spec() {
  ScalingSpec s;
  s.initial = {{0.5, 0.5}, {1.0, 1.0}, {}};
  s.space_exponents = {1.0, 1.0};
  s.time_exponent = 1.0;
  s.convention = TimeConvention::SpeedUp;
  s.n_values = {300, 3000};
  s.replicas = 8;
  s.horizon = 3.0;
  s.seed = 4;
  return s;
}

}  // namespace

TEST_CASE("initial families and time conventions") {
  InitialFamily f{{0.5, 1.0}, {1.0, 0.0}, {0, 3}};
  CHECK(f(101) == StateVector{50, 4});
  ScalingSpec s;
  s.time_exponent = 2.0;
  s.convention = TimeConvention::SlowDown;
  CHECK(s.raw_time(1.5, 10) == doctest::Approx(150.0));
  s.convention = TimeConvention::SpeedUp;
  CHECK(s.raw_time(1.5, 10) == doctest::Approx(0.015));
}

TEST_CASE("monotonicity verdict") {
  auto row = [](double m, double s) {
    PerNResult r;
    r.mean_error = m;
    r.error_stderr = s;
    r.used = 10;
    return r;
  };
  CHECK(monotonicity_verdict({row(0.2, 0.01), row(0.1, 0.01)}) == "decreasing");
  CHECK(monotonicity_verdict({row(0.1, 0.01), row(0.2, 0.01)}) == "not decreasing");
  CHECK(monotonicity_verdict({row(0.1, 0.01), row(0.105, 0.01)}) == "decreasing");
  CHECK(monotonicity_verdict({row(0.1, 0.01)}) == "insufficient data");
}

TEST_CASE("triangle regime a converges") {
  const auto spec = regime_a_spec();
  const auto ref = triangle_regime_curve(TriangleRegime::A, {}, {0.5, 0.5});
  const auto res = run_scaling_experiment(t1(), spec, ref);
  REQUIRE(res.per_n.size() == 2);
  CHECK(res.monotonicity == "decreasing");
  CHECK(res.per_n[1].mean_error < 0.05);
  CHECK(res.per_n[1].used == 8);
  for (const auto& p : res.per_n) {
    for (double e : p.errors) CHECK(e >= 0.0);
  }

  // Reproducible, and independent of the execution mode.
  const auto again = run_scaling_experiment(t1(), spec, ref, Execution::Serial);
  CHECK(again.per_n[1].errors == res.per_n[1].errors);

  auto one = spec;
  one.n_values = {300};
  CHECK(run_scaling_experiment(t1(), one, ref).monotonicity == "insufficient data");
}

TEST_CASE("a trajectory compared with itself has zero error") {
  auto spec = regime_a_spec();
  spec.n_values = {500};
  spec.replicas = 1;
  const auto net = t1();
  const Count n = 500;
  const double raw_h = spec.raw_time(spec.horizon, n);
  SimConfig cfg;
  cfg.seed = spec.seed;
  cfg.stream = 0;
  cfg.max_time = raw_h;
  cfg.thinning = Thinning::on_grid(raw_h / double(spec.grid_points));
  const auto rec = simulate(net, spec.initial(n), cfg);
  const double h = spec.horizon;
  const auto grid_points = spec.grid_points;
  LimitCurve self(
      [rec, h, grid_points, n](double s) {
        const auto k = static_cast<std::size_t>(std::llround(s / h * double(grid_points)));
        const auto& x = k < rec.samples.size() ? rec.samples[k].x : rec.final_state;
        return std::vector<double>{double(x[0]) / double(n), double(x[1]) / double(n)};
      },
      h, true);
  const auto res = run_scaling_experiment(net, spec, self);
  CHECK(res.per_n[0].mean_error == 0.0);
}

TEST_CASE("reference domain must cover the horizon") {
  auto spec = regime_a_spec();
  spec.horizon = 1.0;
  const auto lc = CapHorizontalCurves(1, 1, 1, 1, 1).linear_curve();
  spec.space_exponents = {1.0, std::nullopt};
  spec.horizon = 0.2;
  CHECK_NOTHROW(run_scaling_experiment(cap(2), spec, lc));
  LimitCurve shortc([](double) { return std::vector<double>{0.0}; }, 0.0001);
  spec.grid_points = 10;
  CHECK_THROWS_AS(run_scaling_experiment(cap(2), spec, shortc), DomainError);
}

TEST_CASE("replicas hitting the event limit are excluded, and too many fail the run") {
  auto spec = regime_a_spec();
  spec.max_events = 5;
  const auto ref = triangle_regime_curve(TriangleRegime::A, {}, {0.5, 0.5});
  CHECK_THROWS_AS(run_scaling_experiment(t1(), spec, ref), ExperimentFailure);
}

TEST_CASE("classical scaling of M/M/infinity") {
  const auto scaled = classically_scaled(mm_inf(2.0, 1.0), 100);
  CHECK(scaled.reaction(0).rate_constant() == doctest::Approx(200.0));
  CHECK(scaled.reaction(1).rate_constant() == doctest::Approx(1.0));
  const auto bin = classically_scaled(net("2 S1 -> 0 @ 3\n"), 10);
  CHECK(bin.reaction(0).rate_constant() == doctest::Approx(0.3));

  ScalingSpec s;
  s.initial = {{0.2}, {1.0}, {}};
  s.n_values = {100, 10000};
  s.replicas = 10;
  s.horizon = 5.0;
  s.seed = 1;
  const auto ref = integrate_mass_action_ode(mm_inf(2.0, 1.0), {0.2}, 5.0);
  const auto res = run_classical_scaling(mm_inf(2.0, 1.0), s, ref);
  CHECK(res.per_n[1].mean_error < 0.05);
  CHECK(res.monotonicity == "decreasing");

  // Starting at the equilibrium, the scaled path stays flat.
  s.initial = {{2.0}, {1.0}, {}};
  s.n_values = {100000};
  s.replicas = 3;
  const auto flat = integrate_mass_action_ode(mm_inf(2.0, 1.0), {2.0}, 5.0);
  CHECK(flat(3.0)[0] == doctest::Approx(2.0));
  CHECK(run_classical_scaling(mm_inf(2.0, 1.0), s, flat).per_n[0].mean_error < 0.02);
}

TEST_CASE("occupation against itself and against the queue law") {
  OccupationSpec spec;
  spec.x0 = StateVector{0};
  spec.options.horizon = 200.0;
  spec.replicas = 20;
  spec.seed = 3;
  const auto mm = mm_inf(2.0, 1.0);
  const auto emp = pooled_state_distribution(mm, spec);
  const auto self = run_occupation_experiment(mm, spec, [&](std::size_t k) { return k < emp.size() ? emp[k] : 0.0; });
  CHECK(self.statistic < 1e-12);
  const auto poisson = run_occupation_experiment(
      mm, spec, [](std::size_t k) { return std::exp(double(k) * std::log(2.0) - 2.0 - std::lgamma(double(k) + 1)); });
  CHECK(poisson.statistic < 0.05);
}

TEST_CASE("too few excursions are flagged") {
  ExcursionSpec spec;
  spec.x0 = StateVector{0, 50};
  spec.replicas = 10;
  spec.time_scale = 50.0;
  const auto res = run_excursion_experiment(cap(2), spec, LimitJumpProcess::from_rates(1, 1, 1, 2));
  CHECK(res.flagged);
  CHECK(res.samples == 10);
}

TEST_CASE("drift survey") {
  SimConfig cfg;
  cfg.max_time = 1000.0;
  cfg.seed = 2;
  const auto rows = run_drift_survey(agazzi(), {StateVector{200, 2}, StateVector{400, 2}}, Energy::norm(2),
                                     StopRule::first_jump_of_type({0, 1, 3}), 50, cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.energy_ratio < 0.9);
    CHECK(r.tau_ratio >= 0.0);
  }
  // Inside a small core: values only.
  const auto core = run_drift_survey(agazzi(), {StateVector{1, 1}}, Energy::norm(2), StopRule::first_jump(), 20, cfg);
  CHECK(core.size() == 1);
}

TEST_CASE("experiment configs report the failing field") {
  auto field_of = [](const nlohmann::json& j) {
    try {
      run_experiment(j, CRNLAB_FIXTURES "/experiments", Execution::Serial);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("no error");
  };
  CHECK(field_of({{"kind", "bogus"}, {"model", "../models/t1.crn"}}) == "/kind");
  CHECK(field_of({{"model", "../models/t1.crn"}}) == "/kind");
  CHECK(field_of({{"kind", "scaling"}, {"model", "../models/t1.crn"}}) == "/spec");
  nlohmann::json j = nlohmann::json::parse(R"({"kind": "scaling", "model": "../models/t1.crn",
    "spec": {"initial": {"coef": [0.5, 0.5]}, "n_values": [10, "x"], "horizon": 1},
    "reference": {"type": "triangle", "regime": "a", "x0": [0.5, 0.5]}})");
  CHECK(field_of(j) == "/spec/n_values/1");
  j["spec"]["n_values"] = {10, 20};
  j["reference"]["regime"] = "z";
  CHECK(field_of(j) == "/reference/regime");
  j["reference"]["regime"] = "a";
  j["spec"]["initial"]["coef"] = {0.5};
  CHECK(field_of(j) == "/spec/initial/coef");
  nlohmann::json d = nlohmann::json::parse(R"({"kind": "drift", "model": "../models/agazzi.crn",
    "states": [[10, 2]], "energy": {"kind": "norm"}, "rule": {"kind": "sometimes"}})");
  CHECK(field_of(d) == "/rule/kind");
}

TEST_CASE("experiment thresholds") {
  auto cfg = read_json_file(CRNLAB_FIXTURES "/experiments/t1_regime_a.json");
  cfg["replicas"] = 5;
  cfg["spec"]["n_values"] = {200, 2000};
  cfg["thresholds"]["max_final_error"] = 1e-9;
  const auto out = run_experiment(cfg, CRNLAB_FIXTURES "/experiments");
  CHECK_FALSE(out.passed());
  CHECK(out.result["passed"] == false);
  CHECK(out.csv.rfind("n,mean_error,stderr,used,excluded\n", 0) == 0);
}
