#include "crnlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace crnlab {

StateVector InitialFamily::operator()(Count n) const {
  if (coef.size() != power.size() || (!offset.empty() && offset.size() != coef.size())) {
    throw std::invalid_argument("initial family vectors differ in length");
  }
  StateVector x(coef.size());
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < coef.size(); ++i) {
    const double v = std::floor(coef[i] * std::pow(nd, power[i]));
    if (!(v >= 0.0) || v > 9.0e18) throw std::invalid_argument("initial state out of range");
    x[i] = static_cast<Count>(v) + (offset.empty() ? 0 : offset[i]);
  }
  return x;
}

double ScalingSpec::raw_time(double scaled, Count n) const {
  const double f = std::pow(static_cast<double>(n), time_exponent);
  return convention == TimeConvention::SlowDown ? scaled * f : scaled / f;
}

std::string monotonicity_verdict(const std::vector<PerNResult>& per_n) {
  std::size_t with_data = 0;
  for (const auto& r : per_n) {
    if (r.used >= 2) ++with_data;
  }
  if (with_data < 2 || with_data != per_n.size()) return "insufficient data";
  for (std::size_t i = 1; i < per_n.size(); ++i) {
    const auto& a = per_n[i - 1];
    const auto& b = per_n[i];
    const double slack = std::hypot(a.error_stderr, b.error_stderr);
    if (b.mean_error > a.mean_error + slack) return "not decreasing";
  }
  return "decreasing";
}

namespace {

struct ReplicaError {
  double sup = 0.0;
  std::vector<double> final_value;
  bool excluded = false;
};

// Compared coordinates with their scale exponents.
std::vector<std::pair<std::size_t, double>> compared(const ScalingSpec& spec, std::size_t n_species) {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t i = 0; i < spec.space_exponents.size() && i < n_species; ++i) {
    if (spec.space_exponents[i]) out.emplace_back(i, *spec.space_exponents[i]);
  }
  if (out.empty()) throw std::invalid_argument("no coordinate is compared");
  return out;
}

ComparisonResult compare_family(const std::function<ReactionNetwork(Count)>& net_for, std::size_t n_species,
                                const ScalingSpec& spec, const LimitCurve& reference, Execution exec) {
  if (spec.n_values.empty()) throw std::invalid_argument("no N values");
  if (spec.replicas == 0) throw std::invalid_argument("replicas must be positive");
  if (!(spec.horizon > 0.0) || spec.grid_points == 0) throw std::invalid_argument("horizon and grid must be positive");
  const auto coords = compared(spec, n_species);
  std::vector<std::size_t> ref_index = spec.reference_components;
  if (ref_index.empty()) {
    for (std::size_t j = 0; j < coords.size(); ++j) ref_index.push_back(j);
  }
  if (ref_index.size() != coords.size()) throw std::invalid_argument("reference mapping does not match compared coordinates");

  // Reference on the scaled grid, evaluated once.
  std::vector<double> grid;
  std::vector<std::vector<double>> ref_values;
  for (std::size_t k = 1; k <= spec.grid_points; ++k) {
    const double s = spec.horizon * static_cast<double>(k) / static_cast<double>(spec.grid_points);
    if (!reference.in_domain(s)) continue;
    grid.push_back(s);
    const auto v = reference(s);
    std::vector<double> row;
    for (auto j : ref_index) row.push_back(v.at(j));
    ref_values.push_back(std::move(row));
  }
  if (grid.empty()) throw DomainError("horizon lies outside the reference domain");

  ComparisonResult out;
  out.metric = "sup-error";
  for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni) {
    const Count n = spec.n_values[ni];
    const auto net = net_for(n);
    const auto x0 = spec.initial(n);
    if (x0.size() != n_species) throw std::invalid_argument("initial state has the wrong dimension");
    const double raw_h = spec.raw_time(spec.horizon, n);
    std::vector<double> scale;
    for (const auto& [i, alpha] : coords) scale.push_back(std::pow(static_cast<double>(n), alpha));

    const auto reps = run_replicas<ReplicaError>(
        spec.replicas,
        [&](std::size_t r) {
          SimConfig cfg;
          cfg.seed = spec.seed + 1'000'003ull * ni;
          cfg.stream = r;
          cfg.max_events = spec.max_events;
          cfg.max_time = raw_h;
          cfg.thinning = Thinning::on_grid(raw_h / static_cast<double>(spec.grid_points));
          const auto rec = simulate(net, x0, cfg);
          ReplicaError e;
          if (rec.termination == Termination::EventLimit) {
            e.excluded = true;
            return e;
          }
          // Samples k = 0..grid_points; absorbed paths keep their last state.
          auto at = [&](std::size_t k) -> const StateVector& {
            return k < rec.samples.size() ? rec.samples[k].x : rec.final_state;
          };
          for (std::size_t g = 0; g < grid.size(); ++g) {
            const auto k = static_cast<std::size_t>(std::llround(grid[g] / spec.horizon * static_cast<double>(spec.grid_points)));
            const auto& x = at(k);
            for (std::size_t j = 0; j < coords.size(); ++j) {
              const double v = static_cast<double>(x[coords[j].first]) / scale[j];
              e.sup = std::max(e.sup, std::abs(v - ref_values[g][j]));
            }
          }
          const auto& xf = at(spec.grid_points);
          for (std::size_t j = 0; j < coords.size(); ++j) {
            e.final_value.push_back(static_cast<double>(xf[coords[j].first]) / scale[j]);
          }
          return e;
        },
        exec);

    PerNResult row;
    row.n = n;
    row.mean_final_value.assign(coords.size(), 0.0);
    for (const auto& e : reps) {
      if (e.excluded) {
        ++row.excluded;
        continue;
      }
      row.errors.push_back(e.sup);
      for (std::size_t j = 0; j < coords.size(); ++j) row.mean_final_value[j] += e.final_value[j];
    }
    row.used = row.errors.size();
    if (10 * row.excluded > spec.replicas) {
      std::ostringstream msg;
      msg << "N=" << n << ": " << row.excluded << " of " << spec.replicas << " replicas hit the event limit";
      throw ExperimentFailure(msg.str());
    }
    for (auto& v : row.mean_final_value) v /= static_cast<double>(row.used);
    const auto ms = mean_stderr(row.errors);
    row.mean_error = ms.mean;
    row.error_stderr = ms.stderr_;
    out.per_n.push_back(std::move(row));
  }
  out.monotonicity = monotonicity_verdict(out.per_n);
  return out;
}

}  // namespace

ComparisonResult run_scaling_experiment(const ReactionNetwork& net, const ScalingSpec& spec,
                                        const LimitCurve& reference, Execution exec) {
  return compare_family([&](Count) { return net; }, net.n_species(), spec, reference, exec);
}

ReactionNetwork classically_scaled(const ReactionNetwork& net, Count n) {
  std::vector<double> rates;
  for (const auto& r : net.reactions()) {
    const double order = static_cast<double>(r.source().norm());
    rates.push_back(r.rate_constant() * std::pow(static_cast<double>(n), 1.0 - order));
  }
  return net.with_rates(rates);
}

ComparisonResult run_classical_scaling(const ReactionNetwork& net, const ScalingSpec& spec,
                                       const LimitCurve& reference, Execution exec) {
  ScalingSpec s = spec;
  s.time_exponent = 0.0;
  s.space_exponents.assign(net.n_species(), 1.0);
  return compare_family([&](Count n) { return classically_scaled(net, n); }, net.n_species(), s, reference, exec);
}

std::vector<double> pooled_state_distribution(const ReactionNetwork& net, const OccupationSpec& spec, Execution exec) {
  if (spec.replicas == 0) throw std::invalid_argument("replicas must be positive");
  const auto occs = run_replicas<OccupationMeasure>(
      spec.replicas,
      [&](std::size_t r) {
        SimConfig cfg;
        cfg.seed = spec.seed;
        cfg.stream = r;
        cfg.max_events = spec.max_events;
        cfg.max_time = spec.options.horizon * spec.options.time_scale;
        return occupation_measure(net, spec.x0, spec.options, cfg);
      },
      exec);
  std::size_t excluded = 0;
  OccupationMeasure pooled;
  bool first = true;
  for (const auto& o : occs) {
    if (o.termination == Termination::EventLimit) {
      ++excluded;
      continue;
    }
    if (first) {
      pooled = o;
      first = false;
    } else {
      pooled.merge(o);
    }
  }
  if (10 * excluded > spec.replicas) throw ExperimentFailure("more than 10% of replicas hit the event limit");
  auto marginal = pooled.state_marginal();
  if (spec.condition_positive && !marginal.empty()) marginal[0] = 0.0;
  double total = 0.0;
  for (double m : marginal) total += m;
  if (!(total > 0.0)) throw ExperimentFailure("occupation measure carries no mass");
  for (auto& m : marginal) m /= total;
  return marginal;
}

ComparisonResult run_occupation_experiment(const ReactionNetwork& net, const OccupationSpec& spec,
                                           const std::function<double(std::size_t)>& reference_pmf,
                                           Execution exec) {
  const auto empirical = pooled_state_distribution(net, spec, exec);
  const auto tv = total_variation(empirical, reference_pmf);
  ComparisonResult out;
  out.metric = "tv";
  out.statistic = tv.distance;
  out.leak = tv.empirical_leak;
  out.samples = spec.replicas;
  out.monotonicity = "insufficient data";
  return out;
}

std::vector<ExcursionSample> excursion_sample(const ReactionNetwork& net, const ExcursionSpec& spec, Execution exec) {
  if (spec.trigger >= net.n_species() || spec.tracked >= net.n_species()) {
    throw std::out_of_range("excursion coordinate out of range");
  }
  if (spec.level == 0) throw std::invalid_argument("excursion level must be positive");
  const auto trigger = spec.trigger;
  const auto level = spec.level;
  const auto rule = StopRule::transition_jump([trigger, level](const StateVector& before, const StateVector& after) {
    return before[trigger] == level && after[trigger] + 1 == level;
  });
  const double x_start = static_cast<double>(spec.x0[spec.tracked]);
  if (!(x_start > 0.0)) throw std::invalid_argument("tracked coordinate starts at zero");
  return run_replicas<ExcursionSample>(
      spec.replicas,
      [&](std::size_t r) {
        SimConfig cfg;
        cfg.seed = spec.seed;
        cfg.stream = r;
        cfg.max_events = spec.max_events;
        cfg.max_time = spec.max_time;
        cfg.thinning = Thinning::every_k(std::numeric_limits<std::uint64_t>::max());
        const auto res = run_until(net, spec.x0, rule, cfg);
        ExcursionSample s;
        s.censored = res.censored;
        s.ratio = static_cast<double>(res.stop_state[spec.tracked]) / x_start;
        s.duration = res.stop_time / spec.time_scale;
        return s;
      },
      exec);
}

ComparisonResult run_excursion_experiment(const ReactionNetwork& net, const ExcursionSpec& spec,
                                          const LimitJumpProcess& reference, double level, Execution exec) {
  const auto samples = excursion_sample(net, spec, exec);
  std::vector<double> scaled;
  std::vector<double> durations;
  for (const auto& s : samples) {
    if (s.censored) continue;
    // A ratio of zero means the tracked coordinate was wiped out; it sits in
    // the far tail of the exponential.
    const double v = s.ratio > 0.0 ? -std::log(s.ratio) / reference.delta1 : 50.0;
    scaled.push_back(v);
    durations.push_back(s.duration);
  }
  ComparisonResult out;
  out.metric = "ks";
  out.samples = scaled.size();
  out.monotonicity = "insufficient data";
  if (scaled.size() < 20) {
    out.flagged = true;
    out.note = "fewer than 20 excursions completed";
    return out;
  }
  const auto ks = ks_test(scaled, [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); });
  out.statistic = ks.statistic;
  out.p_value = ks.p_value;
  out.critical_value = ks_critical_value(scaled.size(), level);
  const auto ms = mean_stderr(durations);
  out.mean_duration = ms.mean;
  out.duration_stderr = ms.stderr_;
  const std::size_t censored = samples.size() - scaled.size();
  if (censored > 0) out.note = std::to_string(censored) + " excursions censored";
  return out;
}

std::vector<DriftSurveyRow> run_drift_survey(const ReactionNetwork& net, const std::vector<StateVector>& states,
                                             const Energy& energy, const StopRule& rule, std::size_t replicas,
                                             const SimConfig& cfg, Execution exec) {
  std::vector<DriftSurveyRow> rows;
  for (std::size_t i = 0; i < states.size(); ++i) {
    SimConfig c = cfg;
    c.seed = cfg.seed + 7919ull * i;
    DriftSurveyRow row;
    row.state = states[i];
    row.estimate = estimate_drift(net, states[i], energy, rule, replicas, c, exec);
    const double f0 = row.estimate.initial_energy;
    if (f0 != 0.0) {
      row.energy_ratio = (f0 + row.estimate.mean_energy_change) / f0;
      row.tau_ratio = row.estimate.mean_tau / f0;
    } else {
      row.energy_ratio = std::numeric_limits<double>::quiet_NaN();
      row.tau_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace crnlab
