// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crnlab/experiment_config.hpp"
#include "crnlab/harness.hpp"
#include "crnlab/limits.hpp"
#include "crnlab/parser.hpp"
#include "crnlab/rng.hpp"
#include "crnlab/simulator.hpp"
#include "crnlab/stats.hpp"
#include "crnlab/structural.hpp"

using namespace crnlab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

ReactionNetwork model(const std::string& text) { return parse_network({text, "acceptance"}); }

const std::string kT1 = "%species S1 S2\nS2 -> S1 + S2 @ 1\nS1 + S2 -> S1 @ 1\nS1 -> S2 @ 1\n";
const std::string kEx1 = "%species S1 S2\n0 <-> S2 @ 1, 1\nS2 -> S1 + S2 @ 1\nS1 + S2 -> 2 S1 @ 1\n2 S1 -> S2 @ 1\n";

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Verdict structural() {
  const auto t1 = analyze(model(kT1));
  const auto ex1 = analyze(model(kEx1));
  const bool ok = t1.weakly_reversible && t1.deficiency == 0 && ex1.deficiency == 1;
  return {ok, "T1 weakly_reversible=" + std::string(t1.weakly_reversible ? "true" : "false") +
                  " deficiency=" + std::to_string(t1.deficiency) + ", Ex1 deficiency=" + std::to_string(ex1.deficiency)};
}

Verdict product_form() {
  const auto net = model(kT1);
  const auto c = deterministic_equilibrium(net, {1.0, 1.0});
  const ProductFormMeasure measure(c);
  const double residual = stationarity_residual(net, measure, Window{{30, 30}});

  // Occupation of a long path, restricted to the 15x15 window.
  Gillespie g(net, StateVector{1, 1}, Rng(21, 0));
  std::map<StateVector, double> occ;
  double total = 0.0;
  const std::uint64_t events = 10'000'000;
  while (g.events() < events) {
    const StateVector x = g.state();
    const double t0 = g.time();
    if (g.step(1e300) != Gillespie::Step::Fired) break;
    if (x[0] <= 15 && x[1] <= 15) {
      occ[x] += g.time() - t0;
      total += g.time() - t0;
    }
  }
  const auto cls = measure.truncated_class(net, StateVector{1, 1}, Window{{15, 15}});
  double tv = 0.0;
  for (std::size_t i = 0; i < cls.states.size(); ++i) {
    const auto it = occ.find(cls.states[i]);
    const double emp = it == occ.end() ? 0.0 : it->second / total;
    tv += std::abs(emp - cls.probability[i]);
  }
  tv *= 0.5;
  return {residual < 1e-8 && tv < 0.05,
          fmt("residual %.3g on 30x30, TV %.4f on 15x15 over 1e7 events", residual, tv)};
}

Verdict mm_oracle() {
  const auto net = model("0 <-> S1 @ 1, 1\n");
  const double horizon = 1e4;
  const std::size_t batches = 100;
  Gillespie g(net, StateVector{0}, Rng(22, 0));
  std::vector<double> batch(batches, 0.0);
  std::vector<double> holding;
  const double width = horizon / double(batches);
  while (true) {
    const StateVector x = g.state();
    const double t0 = g.time();
    const double rate = g.total_rate();
    const auto step = g.step(horizon);
    const double t1 = g.time();
    // Spread the sojourn over batches.
    for (double a = t0; a < t1;) {
      const auto b = std::min<std::size_t>(static_cast<std::size_t>(a / width), batches - 1);
      const double end = std::min(t1, double(b + 1) * width);
      batch[b] += double(x[0]) * (end - a);
      a = end;
    }
    if (step != Gillespie::Step::Fired) break;
    holding.push_back((t1 - t0) * rate);
  }
  for (auto& b : batch) b /= width;
  const auto ms = mean_stderr(batch);
  holding.resize(std::min<std::size_t>(holding.size(), 5000));
  const auto ks = ks_test(holding, [](double s) { return s <= 0 ? 0.0 : 1.0 - std::exp(-s); });
  const bool ok = std::abs(ms.mean - 1.0) <= 3.0 * ms.stderr_ && ks.p_value > 0.01;
  return {ok, fmt("time average %.4f (stderr %.4f), holding-time KS p=%.3f", ms.mean, ms.stderr_, ks.p_value)};
}

ExperimentOutcome fixture(const std::string& name) {
  const std::string dir = CRNLAB_FIXTURES "/experiments";
  return run_experiment(read_json_file(dir + "/" + name), dir);
}

std::string errors_of(const nlohmann::json& result) {
  std::ostringstream os;
  os << "sup-error";
  for (const auto& row : result["per_n"]) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " N=%lld: %.4f", static_cast<long long>(row["n"].get<Count>()),
                  row["mean_error"].get<double>());
    os << buf;
  }
  os << ", " << result["monotonicity"].get<std::string>();
  return os.str();
}

Verdict scaling_fixture(const std::string& name) {
  const auto out = fixture(name);
  return {out.passed(), errors_of(out.result)};
}

Verdict agazzi_drift() {
  const auto net = model("0 -> S1 + S2 @ 1\nS2 -> 0 @ 1\n3 S1 + 2 S2 -> 3 S2 @ 1\n3 S2 -> 2 S2 @ 1\n");
  SimConfig cfg;
  cfg.max_time = 1000.0;
  cfg.seed = 15;
  std::vector<StateVector> states;
  for (Count n : {200, 400, 800}) states.push_back(StateVector{n, 2});
  const auto rows = run_drift_survey(net, states, Energy::norm(2), StopRule::first_jump_of_type({0, 1, 3}), 200, cfg);
  bool ok = true;
  std::ostringstream os;
  for (const auto& r : rows) {
    const double n = double(r.state[0]);
    const double change = r.estimate.mean_energy_change;
    ok = ok && r.estimate.replicas > 0 && change <= -0.05 * n;
    char buf[96];
    std::snprintf(buf, sizeof buf, " N=%.0f: %.1f (%.3f N)", n, change, change / n);
    os << buf;
  }
  return {ok, "E|X(tau2)| - N:" + os.str()};
}

Verdict hitting_time() {
  const auto net = model("0 <-> S1 + S2 @ 1, 1\n2 S1 + S2 <-> 2 S1 + 2 S2 @ 1, 1\n");
  bool ok = true;
  std::ostringstream os;
  for (Count n : {300, 1000}) {
    SimConfig cfg;
    cfg.seed = 23;
    cfg.max_time = 1e9;
    const auto sample =
        hitting_time_sample(net, StateVector{0, n}, [](const StateVector& x) { return x[0] == 2; }, 300, cfg);
    std::vector<double> scaled;
    for (const auto& h : sample) {
      if (!h.censored) scaled.push_back(h.time / double(n));
    }
    const auto ms = mean_stderr(scaled);
    const double cv = coefficient_of_variation(scaled);
    ok = ok && scaled.size() == sample.size() && std::abs(ms.mean - 1.0) <= 0.1 && cv >= 0.85 && cv <= 1.15;
    char buf[128];
    std::snprintf(buf, sizeof buf, " N=%lld: mean %.3f (stderr %.3f), CV %.3f;", static_cast<long long>(n), ms.mean,
                  ms.stderr_, cv);
    os << buf;
  }
  return {ok, "scaled hitting time of {x1=2}:" + os.str()};
}

Verdict cap_horizontal() {
  const auto out = fixture("cap_horizontal.json");
  const double v = out.result["per_n"][0]["mean_final_value"][0].get<double>();
  return {out.passed(), fmt("X1(N t)/N at t_inf/2: %.4f, target 0.5", v)};
}

Verdict cap_occupation() {
  const auto out = fixture("cap_occupation.json");
  return {out.passed(), fmt("TV %.4f against zero-truncated Poisson(1)", out.result["tv"].get<double>())};
}

Verdict cap_vertical() {
  const auto out = fixture("cap_vertical.json");
  const auto& r = out.result;
  return {out.passed(), fmt("KS %.4f (critical %.4f), mean scaled duration %.3f", r["ks_statistic"].get<double>(),
                            r["ks_critical_value"].get<double>(), r["mean_duration"].get<double>())};
}

Verdict limit_jump() {
  const auto proc = LimitJumpProcess::from_rates(1, 1, 1, 2);
  bool decreasing = true;
  std::vector<double> logs;
  const std::size_t paths = 100'000;
  logs.reserve(paths * 10);
  for (std::size_t i = 0; i < paths; ++i) {
    const auto path = sample_limit_jump_process(proc, 24, 10, i);
    for (std::size_t k = 1; k < path.size(); ++k) {
      decreasing = decreasing && path[k].v < path[k - 1].v;
      logs.push_back(-std::log(path[k].v / path[k - 1].v));
    }
  }
  const auto ms = mean_stderr(logs);
  const bool ok = decreasing && std::abs(ms.mean - proc.delta1) <= 3.0 * ms.stderr_;
  return {ok, std::string("strictly decreasing: ") + (decreasing ? "yes" : "no") +
                  fmt("; mean -ln ratio %.5f (stderr %.5f), delta1 %.1f", ms.mean, ms.stderr_, proc.delta1)};
}

// Network on a finite class: S1 + S2 + S3 conserved, 231 states at total 20.
const std::string kClosed = "S1 <-> S2 @ 1, 2\n2 S1 <-> S1 + S3 @ 0.5, 1\nS2 + S3 -> 2 S2 @ 0.3\n";

Verdict property_suites() {
  std::ostringstream os;
  bool ok = true;
  const auto net = model(kClosed);

  // Conservation along every event.
  const auto laws = conservation_vectors(net);
  Gillespie g(net, StateVector{20, 0, 0}, Rng(25, 0));
  bool conserved = !laws.basis.empty();
  std::vector<Integer> start;
  for (const auto& rho : laws.basis) start.push_back(dot(rho, g.state()));
  std::map<std::pair<StateVector, std::size_t>, std::uint64_t> fired;
  std::map<StateVector, std::uint64_t> visits;
  while (g.events() < 1'000'000) {
    const StateVector x = g.state();
    if (g.step(1e300) != Gillespie::Step::Fired) break;
    ++visits[x];
    ++fired[{x, g.last_reaction()}];
    for (std::size_t i = 0; i < laws.basis.size(); ++i) conserved = conserved && dot(laws.basis[i], g.state()) == start[i];
  }
  ok = ok && conserved && visits.size() <= 500;
  os << "conservation " << (conserved ? "exact" : "BROKEN") << " over " << g.events() << " events on "
     << visits.size() << " states";

  // Jump frequencies against q(x, y) / q(x).
  std::size_t checked = 0, outside = 0;
  for (const auto& [x, n] : visits) {
    if (n < 100) continue;
    const double q = total_propensity(net, x);
    for (std::size_t r = 0; r < net.reactions().size(); ++r) {
      const double p = propensity(net, r, x) / q;
      const auto it = fired.find({x, r});
      const double f = it == fired.end() ? 0.0 : double(it->second) / double(n);
      const double se = std::sqrt(p * (1 - p) / double(n));
      ++checked;
      if (std::abs(f - p) > 4.0 * se + 1e-12) ++outside;
    }
  }
  ok = ok && outside == 0 && checked > 0;
  os << "; generator frequencies: " << outside << "/" << checked << " outside 4 stderr";

  // Round-trips.
  std::mt19937_64 rng(26);
  std::size_t trips = 0, failed = 0;
  while (trips < 1000) {
    const std::size_t species = 1 + rng() % 4;
    std::vector<Reaction> reactions;
    std::set<std::pair<Complex, Complex>> seen;
    const std::size_t count = 1 + rng() % 6;
    for (std::size_t r = 0; r < count; ++r) {
      CountVector a(species), b(species);
      for (std::size_t i = 0; i < species; ++i) {
        a[i] = rng() % 3;
        b[i] = rng() % 3;
      }
      if (a == b || !seen.insert({Complex(a), Complex(b)}).second) continue;
      reactions.emplace_back(Complex(a), Complex(b), 0.25 + double(rng() % 100) / 8.0);
    }
    if (reactions.empty()) continue;
    ++trips;
    const auto original = ReactionNetwork::with_default_names(species, reactions);
    try {
      const auto back = parse_network({render_network(original), "roundtrip"});
      if (!back.same_structure(original)) ++failed;
    } catch (const std::exception&) {
      ++failed;
    }
  }
  ok = ok && failed == 0;
  os << "; round-trips " << trips - failed << "/" << trips;

  // RK4 order on x' = 1 - x.
  auto err = [](double dt) {
    const auto curve = integrate_field([](const std::vector<double>& x) { return std::vector<double>{1.0 - x[0]}; },
                                       {0.0}, 2.0, OdeOptions{dt, 1e9});
    return std::abs(curve(2.0)[0] - (1.0 - std::exp(-2.0)));
  };
  const double order = std::log2(err(0.1) / err(0.05));
  ok = ok && order > 3.8 && order < 4.2;
  os << "; RK4 order " << fmt("%.3f", order);
  return {ok, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"structural report", structural},
      {"product-form stationarity of T1", product_form},
      {"M/M/infinity oracle", mm_oracle},
      {"triangle regime a", [] { return scaling_fixture("t1_regime_a.json"); }},
      {"triangle regime c", [] { return scaling_fixture("t1_regime_c.json"); }},
      {"Agazzi fast-phase limit", [] { return scaling_fixture("agazzi_y.json"); }},
      {"Agazzi drift", agazzi_drift},
      {"slow/fast hitting time", hitting_time},
      {"slow/fast horizontal limit", cap_horizontal},
      {"slow/fast occupation", cap_occupation},
      {"slow/fast vertical jump law", cap_vertical},
      {"limit jump process", limit_jump},
      {"property suites", property_suites},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    std::printf("%s %2zu %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
