#include "crnlab/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "crnlab/parser.hpp"

namespace crnlab {

using nlohmann::json;

namespace {

std::string at(const std::string& where, const std::string& key) { return where + "/" + key; }

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(at(where, key), "missing field");
  return *it;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where, "expected a finite number");
  return d;
}

std::uint64_t as_count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(where, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

double number(const json& j, const std::string& key, const std::string& where) {
  return as_number(require(j, key, where), at(where, key));
}

double number_or(const json& j, const std::string& key, const std::string& where, double fallback) {
  return j.contains(key) ? as_number(j.at(key), at(where, key)) : fallback;
}

std::uint64_t count(const json& j, const std::string& key, const std::string& where) {
  return as_count(require(j, key, where), at(where, key));
}

std::uint64_t count_or(const json& j, const std::string& key, const std::string& where, std::uint64_t fallback) {
  return j.contains(key) ? as_count(j.at(key), at(where, key)) : fallback;
}

std::string string(const json& j, const std::string& key, const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_string()) throw ConfigError(at(where, key), "expected a string");
  return v.get<std::string>();
}

bool boolean_or(const json& j, const std::string& key, const std::string& where, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(at(where, key), "expected a boolean");
  return j.at(key).get<bool>();
}

const json& array(const json& j, const std::string& key, const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_array()) throw ConfigError(at(where, key), "expected an array");
  return v;
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& where) {
  const auto& a = array(j, key, where);
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_number(a[i], at(where, key) + "/" + std::to_string(i)));
  return out;
}

std::vector<std::uint64_t> counts(const json& j, const std::string& key, const std::string& where) {
  const auto& a = array(j, key, where);
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_count(a[i], at(where, key) + "/" + std::to_string(i)));
  return out;
}

StateVector state(const json& j, const std::string& key, const std::string& where, std::size_t dim) {
  auto v = counts(j, key, where);
  if (v.size() != dim) throw ConfigError(at(where, key), "expected " + std::to_string(dim) + " entries");
  return StateVector(std::vector<Count>(v.begin(), v.end()));
}

InitialFamily initial_family(const json& j, const std::string& where, std::size_t dim) {
  InitialFamily f;
  f.coef = numbers(j, "coef", where);
  f.power = j.contains("power") ? numbers(j, "power", where) : std::vector<double>(f.coef.size(), 1.0);
  if (j.contains("offset")) {
    const auto o = counts(j, "offset", where);
    f.offset.assign(o.begin(), o.end());
  }
  if (f.coef.size() != dim) throw ConfigError(at(where, "coef"), "expected " + std::to_string(dim) + " entries");
  if (f.power.size() != dim) throw ConfigError(at(where, "power"), "expected " + std::to_string(dim) + " entries");
  if (!f.offset.empty() && f.offset.size() != dim) {
    throw ConfigError(at(where, "offset"), "expected " + std::to_string(dim) + " entries");
  }
  return f;
}

ScalingSpec scaling_spec(const json& cfg, const std::string& where, std::size_t dim) {
  const auto& s = require(cfg, "spec", where);
  const std::string w = at(where, "spec");
  ScalingSpec spec;
  spec.initial = initial_family(require(s, "initial", w), at(w, "initial"), dim);
  if (s.contains("space_exponents")) {
    const auto& a = array(s, "space_exponents", w);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].is_null()) {
        spec.space_exponents.emplace_back();
      } else {
        spec.space_exponents.emplace_back(as_number(a[i], at(w, "space_exponents") + "/" + std::to_string(i)));
      }
    }
    if (a.size() != dim) throw ConfigError(at(w, "space_exponents"), "expected " + std::to_string(dim) + " entries");
  } else {
    spec.space_exponents.assign(dim, 1.0);
  }
  spec.time_exponent = number_or(s, "time_exponent", w, 0.0);
  const std::string conv = s.contains("convention") ? string(s, "convention", w) : "speed-up";
  if (conv == "speed-up") {
    spec.convention = TimeConvention::SpeedUp;
  } else if (conv == "slow-down") {
    spec.convention = TimeConvention::SlowDown;
  } else {
    throw ConfigError(at(w, "convention"), "expected \"speed-up\" or \"slow-down\"");
  }
  const auto ns = counts(s, "n_values", w);
  if (ns.empty()) throw ConfigError(at(w, "n_values"), "needs at least one value");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0 || (i > 0 && ns[i] <= ns[i - 1])) {
      throw ConfigError(at(w, "n_values"), "must be positive and increasing");
    }
  }
  spec.n_values.assign(ns.begin(), ns.end());
  spec.horizon = number(s, "horizon", w);
  if (!(spec.horizon > 0.0)) throw ConfigError(at(w, "horizon"), "must be positive");
  spec.grid_points = count_or(s, "grid_points", w, 200);
  if (spec.grid_points == 0) throw ConfigError(at(w, "grid_points"), "must be positive");
  if (s.contains("reference_components")) {
    const auto rc = counts(s, "reference_components", w);
    spec.reference_components.assign(rc.begin(), rc.end());
  }
  spec.replicas = count_or(cfg, "replicas", where, 1);
  if (spec.replicas == 0) throw ConfigError(at(where, "replicas"), "must be positive");
  spec.seed = count_or(cfg, "seed", where, 0);
  spec.max_events = count_or(cfg, "max_events", where, spec.max_events);
  return spec;
}

LimitCurve reference_curve(const json& cfg, const std::string& where, const ReactionNetwork& net, double horizon) {
  const auto& r = require(cfg, "reference", where);
  const std::string w = at(where, "reference");
  const std::string type = string(r, "type", w);
  if (type == "triangle") {
    const std::string regime = string(r, "regime", w);
    TriangleRegime kind;
    if (regime == "a") {
      kind = TriangleRegime::A;
    } else if (regime == "b") {
      kind = TriangleRegime::B;
    } else if (regime == "c") {
      kind = TriangleRegime::C;
    } else {
      throw ConfigError(at(w, "regime"), "expected \"a\", \"b\" or \"c\"");
    }
    TriangleRates k{number_or(r, "k1", w, 1.0), number_or(r, "k2", w, 1.0), number_or(r, "k12", w, 1.0)};
    return triangle_regime_curve(kind, k, numbers(r, "x0", w), number_or(r, "t_end", w, horizon));
  }
  if (type == "mass-action-ode") {
    auto x0 = numbers(r, "x0", w);
    if (x0.size() != net.n_species()) throw ConfigError(at(w, "x0"), "dimension mismatch");
    OdeOptions opts;
    opts.dt = number_or(r, "dt", w, opts.dt);
    const double t_end = number_or(r, "t_end", w, horizon);
    if (boolean_or(r, "dominant", w, false)) return integrate_dominant_ode(net, std::move(x0), t_end, opts);
    return integrate_mass_action_ode(net, std::move(x0), t_end, opts);
  }
  if (type == "agazzi") {
    AgazziCurves c(static_cast<int>(count(r, "p", w)), static_cast<int>(count(r, "q", w)), number(r, "kappa3", w),
                   number_or(r, "kappa4", w, 1.0), number_or(r, "delta", w, 1.0));
    const std::string curve = r.contains("curve") ? string(r, "curve", w) : "y";
    if (curve == "y") return c.y_curve();
    if (curve == "composed") return c.composed_curve();
    if (curve == "final-decay") return c.final_decay_curve();
    throw ConfigError(at(w, "curve"), "expected \"y\", \"composed\" or \"final-decay\"");
  }
  if (type == "cap-linear" || type == "cap-y-inf") {
    CapHorizontalCurves c(number(r, "k0", w), number(r, "k1", w), number(r, "k2", w), number(r, "k3", w),
                          number_or(r, "alpha1", w, 1.0));
    return type == "cap-linear" ? c.linear_curve() : c.y_inf_curve();
  }
  throw ConfigError(at(w, "type"), "unknown reference type \"" + type + "\"");
}

json per_n_json(const ComparisonResult& res) {
  json rows = json::array();
  for (const auto& p : res.per_n) {
    rows.push_back({{"n", p.n},
                    {"mean_error", p.mean_error},
                    {"stderr", p.error_stderr},
                    {"mean_final_value", p.mean_final_value},
                    {"used", p.used},
                    {"excluded", p.excluded}});
  }
  return rows;
}

std::string per_n_csv(const ComparisonResult& res) {
  std::ostringstream out;
  out.precision(10);
  out << "n,mean_error,stderr,used,excluded\n";
  for (const auto& p : res.per_n) {
    out << p.n << ',' << p.mean_error << ',' << p.error_stderr << ',' << p.used << ',' << p.excluded << '\n';
  }
  return out.str();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

ExperimentOutcome scaling_kind(const json& cfg, const std::string& kind, const ReactionNetwork& net, Execution exec) {
  const auto spec = scaling_spec(cfg, "", net.n_species());
  const auto ref = reference_curve(cfg, "", net, spec.horizon);
  const auto res = kind == "classical" ? run_classical_scaling(net, spec, ref, exec)
                                       : run_scaling_experiment(net, spec, ref, exec);
  ExperimentOutcome out;
  out.result = {{"kind", kind},
                {"metric", res.metric},
                {"per_n", per_n_json(res)},
                {"monotonicity", res.monotonicity},
                {"reference_truncated", ref.truncated()}};
  out.csv = per_n_csv(res);
  if (cfg.contains("thresholds")) {
    const auto& t = cfg.at("thresholds");
    const std::string w = "/thresholds";
    const auto& last = res.per_n.back();
    if (t.contains("max_final_error")) {
      const double m = number(t, "max_final_error", w);
      if (!(last.mean_error < m)) {
        out.violations.push_back("final mean error " + fmt(last.mean_error) + " is not below " + fmt(m));
      }
    }
    if (boolean_or(t, "require_decreasing", w, false) && res.monotonicity != "decreasing") {
      out.violations.push_back("errors are " + res.monotonicity);
    }
    if (t.contains("final_value_target")) {
      const double target = number(t, "final_value_target", w);
      const double tol = number(t, "final_value_tolerance", w);
      const auto comp = count_or(t, "final_value_component", w, 0);
      if (comp >= last.mean_final_value.size()) throw ConfigError(at(w, "final_value_component"), "out of range");
      const double v = last.mean_final_value[comp];
      if (!(std::abs(v - target) <= tol)) {
        out.violations.push_back("final value " + fmt(v) + " is not within " + fmt(tol) + " of " + fmt(target));
      }
    }
  }
  return out;
}

ExperimentOutcome occupation_kind(const json& cfg, const ReactionNetwork& net, Execution exec) {
  const std::string mode = cfg.contains("mode") ? string(cfg, "mode", "") : "stationary";
  const auto& r = require(cfg, "reference", "");
  ExperimentOutcome out;
  if (mode == "stationary") {
    OccupationSpec spec;
    spec.x0 = state(cfg, "x0", "", net.n_species());
    spec.options.projection = count(cfg, "projection", "");
    if (spec.options.projection >= net.n_species()) throw ConfigError("/projection", "out of range");
    spec.options.time_scale = number_or(cfg, "time_scale", "", 1.0);
    spec.options.horizon = number(cfg, "horizon", "");
    spec.options.time_bins = count_or(cfg, "time_bins", "", 1);
    spec.options.state_bin_width = number_or(cfg, "state_bin_width", "", 1.0);
    spec.replicas = count_or(cfg, "replicas", "", 1);
    spec.seed = count_or(cfg, "seed", "", 0);
    spec.max_events = count_or(cfg, "max_events", "", spec.max_events);
    spec.condition_positive = boolean_or(cfg, "condition_positive", "", false);
    if (!(spec.options.horizon > 0.0)) throw ConfigError("/horizon", "must be positive");
    if (spec.replicas == 0) throw ConfigError("/replicas", "must be positive");

    const std::string type = string(r, "type", "/reference");
    if (type != "poisson") throw ConfigError("/reference/type", "stationary mode supports \"poisson\"");
    const double lambda = number(r, "lambda", "/reference");
    const bool truncated = boolean_or(r, "zero_truncated", "/reference", false);
    auto pmf = [lambda, truncated](std::size_t k) {
      if (truncated && k == 0) return 0.0;
      const double lp = static_cast<double>(k) * std::log(lambda) - lambda - std::lgamma(static_cast<double>(k) + 1.0);
      const double p = std::exp(lp);
      return truncated ? p / (1.0 - std::exp(-lambda)) : p;
    };
    const auto res = run_occupation_experiment(net, spec, pmf, exec);
    out.result = {{"kind", "occupation"}, {"mode", mode}, {"metric", "tv"}, {"tv", res.statistic}, {"leak", res.leak}};
    out.csv = "metric,value\ntv," + fmt(res.statistic) + "\n";
    if (cfg.contains("thresholds") && cfg.at("thresholds").contains("max_tv")) {
      const double m = number(cfg.at("thresholds"), "max_tv", "/thresholds");
      if (!(res.statistic < m)) out.violations.push_back("TV " + fmt(res.statistic) + " is not below " + fmt(m));
    }
    return out;
  }
  if (mode != "excursion") throw ConfigError("/mode", "expected \"stationary\" or \"excursion\"");
  ExcursionSpec spec;
  spec.x0 = state(cfg, "x0", "", net.n_species());
  spec.trigger = count(cfg, "trigger", "");
  spec.level = count(cfg, "level", "");
  spec.tracked = count(cfg, "tracked", "");
  if (spec.trigger >= net.n_species()) throw ConfigError("/trigger", "out of range");
  if (spec.tracked >= net.n_species()) throw ConfigError("/tracked", "out of range");
  spec.time_scale = number_or(cfg, "time_scale", "", 1.0);
  spec.replicas = count_or(cfg, "replicas", "", spec.replicas);
  spec.seed = count_or(cfg, "seed", "", 0);
  spec.max_events = count_or(cfg, "max_events", "", spec.max_events);
  spec.max_time = number_or(cfg, "max_time", "", spec.max_time);
  if (string(r, "type", "/reference") != "limit-jump") {
    throw ConfigError("/reference/type", "excursion mode supports \"limit-jump\"");
  }
  const auto proc = LimitJumpProcess::from_rates(number(r, "k0", "/reference"), number(r, "k1", "/reference"),
                                                 number(r, "k3", "/reference"),
                                                 static_cast<int>(count(r, "p", "/reference")));
  double level = 0.01;
  if (cfg.contains("thresholds")) level = number_or(cfg.at("thresholds"), "ks_level", "/thresholds", level);
  const auto res = run_excursion_experiment(net, spec, proc, level, exec);
  out.result = {{"kind", "occupation"},
                {"mode", mode},
                {"metric", "ks"},
                {"samples", res.samples},
                {"flagged", res.flagged},
                {"note", res.note},
                {"ks_statistic", res.statistic},
                {"ks_p_value", res.p_value},
                {"ks_critical_value", res.critical_value},
                {"mean_duration", res.mean_duration},
                {"duration_stderr", res.duration_stderr},
                {"r1", proc.r1},
                {"delta1", proc.delta1}};
  out.csv = "metric,value\nks_statistic," + fmt(res.statistic) + "\nmean_duration," + fmt(res.mean_duration) + "\n";
  if (res.flagged) out.violations.push_back(res.note);
  if (cfg.contains("thresholds")) {
    const auto& t = cfg.at("thresholds");
    if (!res.flagged && t.contains("ks_level") && !(res.statistic <= res.critical_value)) {
      out.violations.push_back("KS statistic " + fmt(res.statistic) + " exceeds " + fmt(res.critical_value));
    }
    if (t.contains("duration_rel_tol")) {
      const double tol = number(t, "duration_rel_tol", "/thresholds");
      const double target = number_or(t, "duration_target", "/thresholds", 1.0 / proc.r1);
      if (!(std::abs(res.mean_duration - target) <= tol * target)) {
        out.violations.push_back("mean duration " + fmt(res.mean_duration) + " is not within " + fmt(100 * tol) +
                                 "% of " + fmt(target));
      }
    }
  }
  return out;
}

ExperimentOutcome drift_kind(const json& cfg, const ReactionNetwork& net, Execution exec) {
  std::vector<StateVector> states;
  if (cfg.contains("states")) {
    const auto& a = array(cfg, "states", "");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string w = "/states/" + std::to_string(i);
      if (!a[i].is_array() || a[i].size() != net.n_species()) throw ConfigError(w, "expected a state vector");
      StateVector x(net.n_species());
      for (std::size_t k = 0; k < a[i].size(); ++k) x[k] = as_count(a[i][k], w + "/" + std::to_string(k));
      states.push_back(x);
    }
  } else {
    const auto fam = initial_family(require(cfg, "initial", ""), "/initial", net.n_species());
    for (auto n : counts(cfg, "n_values", "")) states.push_back(fam(n));
  }
  if (states.empty()) throw ConfigError("/states", "needs at least one state");
  const auto energy = energy_from_json(require(cfg, "energy", ""), "/energy");
  const auto rule = stop_rule_from_json(require(cfg, "rule", ""), "/rule");
  const auto replicas = count_or(cfg, "replicas", "", 2);
  if (replicas < 2) throw ConfigError("/replicas", "needs at least 2");
  SimConfig sim;
  sim.seed = count_or(cfg, "seed", "", 0);
  sim.max_events = count_or(cfg, "max_events", "", sim.max_events);
  sim.max_time = number_or(cfg, "max_time", "", 1e9);
  sim.thinning = Thinning::every_k(std::numeric_limits<std::uint64_t>::max());
  const auto rows = run_drift_survey(net, states, energy, rule, replicas, sim, exec);

  ExperimentOutcome out;
  json table = json::array();
  std::ostringstream csv;
  csv.precision(10);
  csv << "state,initial_energy,mean_energy_change,stderr,mean_tau,energy_ratio,tau_ratio,replicas,censored\n";
  for (const auto& r : rows) {
    std::vector<Count> x(r.state.vec());
    table.push_back({{"state", x},
                     {"energy", r.estimate.energy_name},
                     {"initial_energy", r.estimate.initial_energy},
                     {"mean_energy_change", r.estimate.mean_energy_change},
                     {"energy_change_stderr", r.estimate.energy_change_stderr},
                     {"mean_tau", r.estimate.mean_tau},
                     {"tau_stderr", r.estimate.tau_stderr},
                     {"drift_ratio", r.estimate.drift_ratio},
                     {"energy_ratio", r.energy_ratio},
                     {"tau_ratio", r.tau_ratio},
                     {"replicas", r.estimate.replicas},
                     {"censored", r.estimate.censored},
                     {"tau_censored", r.estimate.tau_censored}});
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + std::to_string(x[i]);
    csv << s << ',' << r.estimate.initial_energy << ',' << r.estimate.mean_energy_change << ','
        << r.estimate.energy_change_stderr << ',' << r.estimate.mean_tau << ',' << r.energy_ratio << ','
        << r.tau_ratio << ',' << r.estimate.replicas << ',' << r.estimate.censored << '\n';
  }
  out.result = {{"kind", "drift"}, {"rows", table}};
  out.csv = csv.str();
  if (cfg.contains("thresholds")) {
    const auto& t = cfg.at("thresholds");
    for (const auto& r : rows) {
      std::string s = "(";
      for (std::size_t i = 0; i < r.state.size(); ++i) s += (i ? "," : "") + std::to_string(r.state[i]);
      s += ")";
      if (t.contains("max_energy_ratio")) {
        const double m = number(t, "max_energy_ratio", "/thresholds");
        if (!(r.energy_ratio <= m)) {
          out.violations.push_back("energy ratio " + fmt(r.energy_ratio) + " at " + s + " exceeds " + fmt(m));
        }
      }
      if (t.contains("max_tau_ratio")) {
        const double m = number(t, "max_tau_ratio", "/thresholds");
        if (!(r.tau_ratio <= m)) out.violations.push_back("tau ratio " + fmt(r.tau_ratio) + " at " + s + " exceeds " + fmt(m));
      }
    }
  }
  return out;
}

}  // namespace

StopRule stop_rule_from_json(const json& j, const std::string& where) {
  const std::string kind = string(j, "kind", where);
  const auto cnt = count_or(j, "count", where, 1);
  if (cnt == 0) throw ConfigError(at(where, "count"), "must be positive");
  if (kind == "first_jump") return StopRule::first_jump();
  if (kind == "nth_jump") return StopRule::nth_jump(count(j, "n", where));
  if (kind == "fixed_time") return StopRule::fixed_time(number(j, "eta", where));
  if (kind == "jump_of_type") {
    const auto r = counts(j, "reactions", where);
    return StopRule::first_jump_of_type(std::vector<std::size_t>(r.begin(), r.end()), cnt);
  }
  if (kind == "displacement") {
    const auto& a = array(j, "displacement", where);
    std::vector<std::int64_t> d;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_number_integer()) throw ConfigError(at(where, "displacement") + "/" + std::to_string(i), "expected an integer");
      d.push_back(a[i].get<std::int64_t>());
    }
    return StopRule::displacement_jump(std::move(d), cnt);
  }
  if (kind == "hit_set") {
    const auto i = count(j, "coordinate", where);
    const bool has_max = j.contains("at_most");
    const bool has_min = j.contains("at_least");
    const Count hi = count_or(j, "at_most", where, 0);
    const Count lo = count_or(j, "at_least", where, 0);
    if (!has_max && !has_min) throw ConfigError(where, "hit_set needs at_most or at_least");
    return StopRule::hit_set([=](const StateVector& x) {
      if (i >= x.size()) return false;
      return (!has_max || x[i] <= hi) && (!has_min || x[i] >= lo);
    });
  }
  if (kind == "composite") {
    const auto& a = array(j, "stages", where);
    std::vector<StopRule> stages;
    for (std::size_t i = 0; i < a.size(); ++i) stages.push_back(stop_rule_from_json(a[i], at(where, "stages") + "/" + std::to_string(i)));
    if (stages.empty()) throw ConfigError(at(where, "stages"), "needs at least one stage");
    return StopRule::composite(std::move(stages));
  }
  throw ConfigError(at(where, "kind"), "unknown stop rule \"" + kind + "\"");
}

Energy energy_from_json(const json& j, const std::string& where) {
  const std::string kind = string(j, "kind", where);
  if (kind == "entropy") return Energy::entropy();
  if (kind == "linear") return Energy::linear(numbers(j, "coefficients", where));
  if (kind == "polynomial") return Energy::polynomial(numbers(j, "exponents", where));
  if (kind == "norm") return Energy::norm(count(j, "dimension", where));
  throw ConfigError(at(where, "kind"), "unknown energy \"" + kind + "\"");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
}

ExperimentOutcome run_experiment(const json& config, const std::filesystem::path& base_dir, Execution exec) {
  if (!config.is_object()) throw ConfigError("", "expected an object");
  const std::string kind = string(config, "kind", "");
  if (kind != "scaling" && kind != "classical" && kind != "occupation" && kind != "drift") {
    throw ConfigError("/kind", "unknown experiment kind \"" + kind + "\"");
  }
  std::filesystem::path model = string(config, "model", "");
  if (model.is_relative()) model = base_dir / model;
  const auto net = parse_network(read_model_file(model));

  ExperimentOutcome out;
  if (kind == "scaling" || kind == "classical") {
    out = scaling_kind(config, kind, net, exec);
  } else if (kind == "occupation") {
    out = occupation_kind(config, net, exec);
  } else {
    json cfg = config;
    // "norm" energies need the dimension.
    if (cfg.contains("energy") && cfg["energy"].is_object() && cfg["energy"].value("kind", "") == "norm") {
      cfg["energy"]["dimension"] = net.n_species();
    }
    out = drift_kind(cfg, net, exec);
  }
  if (config.contains("name")) out.result["name"] = config.at("name");
  out.result["seed"] = config.value("seed", 0);
  out.result["passed"] = out.passed();
  out.result["violations"] = out.violations;
  return out;
}

}  // namespace crnlab
