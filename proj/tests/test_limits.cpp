#include <doctest.h>

#include <cmath>
#include <random>

#include "crnlab/limits.hpp"
#include "crnlab/stats.hpp"
#include "crnlab/structural.hpp"
#include "helpers.hpp"

using namespace crnlab;
using namespace crnlab::test;

TEST_CASE("curve domains") {
  LimitCurve open([](double t) { return std::vector<double>{t}; }, 2.0);
  CHECK(open(1.5)[0] == 1.5);
  CHECK_THROWS_AS(open(2.0), DomainError);
  CHECK_THROWS_AS(open(-0.1), DomainError);
  LimitCurve closed([](double t) { return std::vector<double>{t}; }, 2.0, true);
  CHECK(closed(2.0)[0] == 2.0);
  CHECK(curve_csv(closed, {0.0, 1.0}) == "t,v_1\n0,0\n1,1\n");
}

TEST_CASE("linear ODE against its closed form") {
  const double lambda = 2.0, mu = 0.5, x0 = 0.3;
  const auto c = integrate_mass_action_ode(mm_inf(lambda, mu), {x0}, 10.0);
  double err = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.01 * i;
    const double exact = lambda / mu + (x0 - lambda / mu) * std::exp(-mu * t);
    err = std::max(err, std::abs(c(t)[0] - exact));
  }
  CHECK(err < 1e-8);
  CHECK(c.closed_end());
}

TEST_CASE("RK4 is fourth order") {
  auto field = [](const std::vector<double>& x) { return std::vector<double>{-x[0] + std::sin(x[0])}; };
  auto err_at = [&](double dt) {
    OdeOptions o;
    o.dt = dt;
    auto f = [](const std::vector<double>& x) { return std::vector<double>{-2.0 * x[0]}; };
    const auto c = integrate_field(f, {1.0}, 2.0, o);
    return std::abs(c(2.0)[0] - std::exp(-4.0));
  };
  const double e1 = err_at(0.1), e2 = err_at(0.05);
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.8);
  CHECK(order < 4.2);
  OdeOptions o;
  const auto flat = integrate_field(field, {0.0}, 3.0, o);
  CHECK(flat(2.5)[0] == 0.0);
}

TEST_CASE("equilibrium start gives a constant curve") {
  const auto c = integrate_mass_action_ode(t1(), {1.0, 1.0}, 5.0);
  CHECK(c(4.3)[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c(4.3)[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("blow-up is flagged") {
  auto f = [](const std::vector<double>& x) { return std::vector<double>{x[0] * x[0]}; };
  const auto c = integrate_field(f, {1.0}, 2.0);
  CHECK(c.truncated());
  CHECK(c.t_end() < 1.01);
  CHECK(c.t_end() > 0.99);
  CHECK_THROWS_AS(c(1.5), DomainError);
  CHECK(c(0.5)[0] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("ODE conserves linear invariants") {
  const auto n = net("S1 + S2 -> S3 @ 1\nS3 -> S1 + S2 @ 0.5\nS3 -> S4 + S2 @ 2\nS4 -> S1 @ 1\n");
  const auto laws = conservation_vectors(n);
  REQUIRE_FALSE(laws.basis.empty());
  const std::vector<double> x0{1.0, 0.5, 0.2, 0.3};
  const auto c = integrate_mass_action_ode(n, x0, 10.0);
  for (const auto& rho : laws.basis) {
    auto inner = [&](const std::vector<double>& x) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += rho[i].convert_to<double>() * x[i];
      return s;
    };
    for (double t : {1.0, 5.0, 10.0}) CHECK(std::abs(inner(c(t)) - inner(x0)) < 1e-8);
  }
}

TEST_CASE("dominant ODE") {
  const auto t = t1();
  const auto d = dominant_subnetwork(t);
  REQUIRE(d.reactions().size() == 1);
  const auto c = integrate_dominant_ode(t, {0.3, 0.7}, 5.0);
  for (double s : {0.5, 2.0, 4.9}) {
    CHECK(c(s)[0] == doctest::Approx(0.3));
    CHECK(c(s)[1] == doctest::Approx(0.7 * std::exp(-0.3 * s)).epsilon(1e-9));
  }
  const auto binary = net("2 S1 -> S1 + S2 @ 1\nS1 + S2 -> 2 S2 @ 2\n");
  const auto a = integrate_dominant_ode(binary, {1.0, 0.0}, 3.0);
  const auto b = integrate_mass_action_ode(binary, {1.0, 0.0}, 3.0);
  CHECK(a(2.0)[0] == b(2.0)[0]);
}

TEST_CASE("triangle regimes") {
  TriangleRates k{1.0, 1.0, 1.0};
  const auto c = triangle_regime_curve(TriangleRegime::C, k, {1.0});
  CHECK(c(0.0)[0] == 1.0);
  CHECK(c(1.0)[0] == doctest::Approx(std::exp(-1.0)));
  const auto a = triangle_regime_curve(TriangleRegime::A, {1.0, 1.0, 2.0}, {0.5, 0.5});
  CHECK(a(1.0)[1] == doctest::Approx(0.5 * std::exp(-1.0)));
  const auto b = triangle_regime_curve(TriangleRegime::B, {1.0, 3.0, 1.0}, {0.0, 1.0}, 5.0);
  CHECK(b(0.0)[0] == 0.0);
  CHECK(b(1e-4)[0] / 1e-4 == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("agazzi curves") {
  const AgazziCurves one(2, 2, 0.5, 1.0);
  CHECK(one.y1(0.0) == 1.0);
  CHECK(one.y1(1.0) == doctest::Approx(0.5));
  CHECK(one.y2(1.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(one.phi(1.0), DomainError);

  const AgazziCurves d(3, 2, 1.0, 1.0, 0.5);
  CHECK(d.y1(0.0) == 0.5);
  double last = 0.0;
  for (double t : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    const double p = d.phi(t);
    CHECK(p > last);
    last = p;
    CHECK(std::abs(d.phi_inverse(p) - t) < 1e-8);
  }
  CHECK(d.final_decay(0.0) == 1.0);
  CHECK(d.final_decay(1.0) == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("horizontal curves of the slow/fast network") {
  const CapHorizontalCurves c(1.0, 1.0, 1.0, 1.0, 1.0);
  CHECK(c.t_inf() == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)));
  CHECK(c.t_inf() == doctest::Approx(0.581977).epsilon(1e-6));
  CHECK(c.linear(0.0) == 1.0);
  const auto lc = c.linear_curve();
  CHECK_THROWS_AS(lc(c.t_inf()), DomainError);

  const CapHorizontalCurves g(0.7, 1.3, 2.0, 0.8, 0.6);
  for (int i = 0; i < 50; ++i) {
    const double t = g.t_inf() * i / 50.0;
    CHECK(std::abs(g.y_inf(g.a_inverse(t)) - g.linear(t)) < 1e-10);
    CHECK(std::abs(g.a_inverse(t) - g.a_inverse_numeric(t)) < 1e-8);
  }
}

TEST_CASE("limit jump process") {
  const auto proc = LimitJumpProcess::from_rates(1.0, 1.0, 1.0, 2, 0.8);
  CHECK(proc.r1 == 1.0);
  CHECK(proc.delta1 == 1.0);
  const auto p3 = LimitJumpProcess::from_rates(2.0, 1.0, 1.5, 3);
  CHECK(p3.r1 == doctest::Approx(2.0 / 2.0 * 4.0));
  CHECK(p3.delta1 == doctest::Approx(3.0));

  const auto path = sample_limit_jump_process(proc, 1, 30);
  REQUIRE(path.size() == 31);
  CHECK(path[0].v == 0.8);
  CHECK(path[0].t == 0.0);
  for (std::size_t k = 1; k < path.size(); ++k) {
    CHECK(path[k].v < path[k - 1].v);
    // Increments fall below one ulp once V is tiny.
    CHECK(path[k].t >= path[k - 1].t);
  }

  std::vector<double> first;
  for (std::uint64_t s = 0; s < 20000; ++s) first.push_back(sample_limit_jump_process(proc, 5, 1, s)[1].t);
  const auto ms = mean_stderr(first);
  CHECK(std::abs(ms.mean - 0.8 / proc.r1) < 3.0 * ms.stderr_);
}
