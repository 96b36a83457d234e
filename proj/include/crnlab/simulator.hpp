#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crnlab/core.hpp"
#include "crnlab/ensemble.hpp"
#include "crnlab/rng.hpp"

namespace crnlab {

enum class Termination { TimeLimit, EventLimit, Absorbed, StopRule };

std::string to_string(Termination t);

struct Thinning {
  enum class Kind { EveryEvent, EveryK, OnGrid };
  Kind kind = Kind::EveryEvent;
  std::uint64_t k = 1;
  double dt = 0.0;

  static Thinning every_event() { return {}; }
  static Thinning every_k(std::uint64_t k) { return {Kind::EveryK, k, 0.0}; }
  static Thinning on_grid(double dt) { return {Kind::OnGrid, 1, dt}; }
};

struct SimConfig {
  std::uint64_t seed = 0;
  /// Random stream within the seed; replica runners overwrite it.
  std::uint64_t stream = 0;
  std::uint64_t max_events = 100'000'000;
  /// Must be set; there is no implicit horizon.
  double max_time = 0.0;
  Thinning thinning;

  /// Throws std::invalid_argument on non-positive limits or thinning step.
  void validate() const;
};

struct Sample {
  double t = 0.0;
  StateVector x;
};

struct TrajectoryRecord {
  std::vector<Sample> samples;
  Termination termination = Termination::TimeLimit;
  std::uint64_t event_count = 0;
  double end_time = 0.0;
  StateVector final_state;
};

/// Gillespie direct method over a fixed network. Propensities are recomputed
/// by a linear scan at every step.
class Gillespie {
 public:
  enum class Step { Fired, Absorbed, Horizon };

  Gillespie(const ReactionNetwork& net, StateVector x0, Rng rng);

  /// Draws the next event. If it would fall after horizon, the clock moves to
  /// horizon and nothing fires (the holding time is memoryless). On
  /// absorption the clock does not move.
  Step step(double horizon);

  double time() const { return t_; }
  const StateVector& state() const { return x_; }
  std::uint64_t events() const { return events_; }
  /// Reaction fired by the last successful step.
  std::size_t last_reaction() const { return last_; }
  /// Total propensity at the current state.
  double total_rate();

 private:
  void refresh();

  struct Term {
    std::size_t species;
    Count count;
  };
  const ReactionNetwork* net_;
  std::vector<std::vector<Term>> sources_;
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> jumps_;
  std::vector<double> rates_;
  StateVector x_;
  Rng rng_;
  double t_ = 0.0;
  double total_ = 0.0;
  bool fresh_ = false;
  std::uint64_t events_ = 0;
  std::size_t last_ = 0;
};

using StatePredicate = std::function<bool(const StateVector&)>;
using TransitionPredicate = std::function<bool(const StateVector& before, const StateVector& after)>;

/// When a run should stop. Within a composite sequence each stage starts when
/// the previous one fires, and counts restart.
struct StopRule {
  enum class Kind { FirstJump, NthJump, FixedTime, HitSet, FirstJumpOfType, Displacement, Transition, Composite };
  Kind kind = Kind::FirstJump;
  std::uint64_t count = 1;
  double eta = 0.0;
  StatePredicate hit;
  std::vector<std::size_t> reactions;
  std::vector<std::int64_t> displacement;
  TransitionPredicate transition;
  std::vector<StopRule> sequence;

  static StopRule first_jump();
  static StopRule nth_jump(std::uint64_t n);
  static StopRule fixed_time(double eta);
  /// Fires at t = 0 if the initial state is already in the set.
  static StopRule hit_set(StatePredicate predicate);
  /// count-th jump whose reaction index is in the subset.
  static StopRule first_jump_of_type(std::vector<std::size_t> reactions, std::uint64_t count = 1);
  /// count-th jump with the given displacement, whatever reaction caused it.
  static StopRule displacement_jump(std::vector<std::int64_t> d, std::uint64_t count = 1);
  /// count-th jump for which predicate(before, after) holds.
  static StopRule transition_jump(TransitionPredicate predicate, std::uint64_t count = 1);
  static StopRule composite(std::vector<StopRule> stages);
};

struct RunResult {
  TrajectoryRecord record;
  StateVector stop_state;
  double stop_time = 0.0;
  /// The rule did not fire before a limit or absorption.
  bool censored = false;
};

TrajectoryRecord simulate(const ReactionNetwork& net, const StateVector& x0, const SimConfig& cfg);

RunResult run_until(const ReactionNetwork& net, const StateVector& x0, const StopRule& rule, const SimConfig& cfg);

/// CSV with header t,x_1,...,x_n and a trailing "# termination: ..." comment.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record);

struct Energy {
  enum class Kind { Linear, Entropy, Polynomial };
  Kind kind = Kind::Linear;
  /// Linear: weights. Polynomial: exponents, f(x) = sum_i x_i^{e_i} over e_i > 0.
  std::vector<double> coefficients;

  static Energy linear(std::vector<double> weights) { return {Kind::Linear, std::move(weights)}; }
  static Energy norm(std::size_t n) { return linear(std::vector<double>(n, 1.0)); }
  static Energy entropy() { return {Kind::Entropy, {}}; }
  static Energy polynomial(std::vector<double> exponents) { return {Kind::Polynomial, std::move(exponents)}; }

  std::string name() const;
  double operator()(const StateVector& x) const;
};

struct DriftEstimate {
  std::string energy_name;
  double initial_energy = 0.0;
  double mean_energy_change = 0.0;
  double energy_change_stderr = 0.0;
  double mean_tau = 0.0;
  double tau_stderr = 0.0;
  double drift_ratio = 0.0;
  /// Replicas used (stop rule fired).
  std::size_t replicas = 0;
  std::size_t censored = 0;
  /// Set when every replica was absorbed before the rule fired.
  bool tau_censored = false;
};

/// Monte Carlo estimate of E_x f(X(tau)) - f(x) and E_x tau. Censored replicas
/// are excluded and counted. Throws std::runtime_error if every replica was
/// censored by a limit.
DriftEstimate estimate_drift(const ReactionNetwork& net, const StateVector& x0, const Energy& energy,
                             const StopRule& rule, std::size_t replicas, const SimConfig& cfg,
                             Execution exec = Execution::Parallel);

/// Sojourn time of a projected coordinate binned over scaled time and scaled
/// space. Masses are scaled by 1/time_scale, so the total is the scaled time
/// covered.
struct OccupationMeasure {
  double time_scale = 1.0;
  double space_scale = 1.0;
  double horizon = 0.0;  // scaled
  std::size_t time_bins = 1;
  double state_bin_width = 1.0;  // in scaled space units
  /// mass[time_bin][state_bin]
  std::vector<std::vector<double>> mass;
  Termination termination = Termination::TimeLimit;

  double total_mass() const;
  /// Mass per state bin summed over time.
  std::vector<double> state_marginal() const;
  /// Adds the sojourn of value in [t0, t1) (raw time).
  void add(double t0, double t1, Count value);
  void merge(const OccupationMeasure& other);
};

struct OccupationOptions {
  std::size_t projection = 0;
  double time_scale = 1.0;
  double space_scale = 1.0;
  double horizon = 1.0;  // scaled
  std::size_t time_bins = 1;
  double state_bin_width = 1.0;
};

/// One replica. An absorbed path keeps its state until the horizon.
OccupationMeasure occupation_measure(const ReactionNetwork& net, const StateVector& x0,
                                     const OccupationOptions& opts, const SimConfig& cfg);

struct HittingTime {
  double time = 0.0;
  bool censored = false;
};

std::vector<HittingTime> hitting_time_sample(const ReactionNetwork& net, const StateVector& x0,
                                             const StatePredicate& target, std::size_t replicas,
                                             const SimConfig& cfg, Execution exec = Execution::Parallel);

}  // namespace crnlab
