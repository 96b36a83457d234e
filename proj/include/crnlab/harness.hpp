#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crnlab/core.hpp"
#include "crnlab/ensemble.hpp"
#include "crnlab/limits.hpp"
#include "crnlab/simulator.hpp"
#include "crnlab/stats.hpp"

namespace crnlab {

/// Raised when more than 10% of the replicas at some N had to be excluded.
class ExperimentFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// slow-down: one scaled time unit is N^beta raw units (t -> N^beta t).
/// speed-up: one scaled time unit is N^-beta raw units (t -> t / N^beta).
enum class TimeConvention { SlowDown, SpeedUp };

/// x_i(N) = floor(coef_i N^{power_i}) + offset_i.
struct InitialFamily {
  std::vector<double> coef;
  std::vector<double> power;
  std::vector<Count> offset;

  StateVector operator()(Count n) const;
};

struct ScalingSpec {
  InitialFamily initial;
  /// alpha_i; coordinates left empty are simulated but not compared.
  std::vector<std::optional<double>> space_exponents;
  double time_exponent = 0.0;
  TimeConvention convention = TimeConvention::SpeedUp;
  std::vector<Count> n_values;
  std::size_t replicas = 1;
  double horizon = 1.0;  // scaled time
  std::uint64_t seed = 0;
  std::uint64_t max_events = 100'000'000;
  std::size_t grid_points = 200;
  /// Reference component compared with each compared coordinate, in order.
  /// Defaults to 0, 1, 2, ...
  std::vector<std::size_t> reference_components;

  double raw_time(double scaled, Count n) const;
};

struct PerNResult {
  Count n = 0;
  /// Mean and stderr over used replicas of the sup error on the grid.
  double mean_error = 0.0;
  double error_stderr = 0.0;
  /// Replica mean of each compared scaled coordinate at the horizon.
  std::vector<double> mean_final_value;
  std::vector<double> errors;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

struct ComparisonResult {
  std::string metric;  // "sup-error", "tv", "ks"
  std::vector<PerNResult> per_n;
  /// "decreasing", "not decreasing" or "insufficient data".
  std::string monotonicity;
  /// Distributional targets.
  double statistic = 0.0;
  double p_value = 1.0;
  double critical_value = 0.0;
  double leak = 0.0;
  std::size_t samples = 0;
  bool flagged = false;
  std::string note;
  /// Excursion experiments: mean and stderr of the scaled durations.
  double mean_duration = 0.0;
  double duration_stderr = 0.0;
};

/// Verdict on a sequence of mean errors: each step may rise by at most the
/// combined standard error.
std::string monotonicity_verdict(const std::vector<PerNResult>& per_n);

/// Sup over the grid of |X_i(raw(t)) / N^{alpha_i} - reference(t)|.
ComparisonResult run_scaling_experiment(const ReactionNetwork& net, const ScalingSpec& spec,
                                        const LimitCurve& reference, Execution exec = Execution::Parallel);

/// kappa_r -> kappa_r N^{1 - |y_r^-|}, time unscaled, every coordinate scaled
/// by 1/N.
ReactionNetwork classically_scaled(const ReactionNetwork& net, Count n);

ComparisonResult run_classical_scaling(const ReactionNetwork& net, const ScalingSpec& spec,
                                       const LimitCurve& reference, Execution exec = Execution::Parallel);

struct OccupationSpec {
  StateVector x0;
  OccupationOptions options;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::uint64_t max_events = 100'000'000;
  /// Drop state bin 0 and renormalize (conditioning on a positive coordinate).
  bool condition_positive = false;
};

/// Time-marginal of the pooled occupation measure against a reference pmf, by
/// total variation.
ComparisonResult run_occupation_experiment(const ReactionNetwork& net, const OccupationSpec& spec,
                                           const std::function<double(std::size_t)>& reference_pmf,
                                           Execution exec = Execution::Parallel);

/// Empirical distribution (normalized) that run_occupation_experiment compares.
std::vector<double> pooled_state_distribution(const ReactionNetwork& net, const OccupationSpec& spec,
                                              Execution exec = Execution::Parallel);

struct ExcursionSpec {
  StateVector x0;
  /// The excursion ends when x[trigger] jumps from level to level - 1.
  std::size_t trigger = 0;
  Count level = 2;
  /// Coordinate whose ratio X(T1) / X(0) is recorded.
  std::size_t tracked = 1;
  /// Durations are divided by this (N^{p-1}).
  double time_scale = 1.0;
  std::size_t replicas = 200;
  std::uint64_t seed = 0;
  std::uint64_t max_events = 100'000'000;
  double max_time = 1e12;
};

struct ExcursionSample {
  double ratio = 0.0;
  double duration = 0.0;  // scaled
  bool censored = false;
};

std::vector<ExcursionSample> excursion_sample(const ReactionNetwork& net, const ExcursionSpec& spec,
                                              Execution exec = Execution::Parallel);

/// KS test of -ln(ratio)/delta1 against Exp(1), and mean scaled duration.
/// Flagged when fewer than 20 excursions completed.
ComparisonResult run_excursion_experiment(const ReactionNetwork& net, const ExcursionSpec& spec,
                                          const LimitJumpProcess& reference, double level = 0.01,
                                          Execution exec = Execution::Parallel);

struct DriftSurveyRow {
  StateVector state;
  DriftEstimate estimate;
  /// E_x f(X(tau)) / f(x)
  double energy_ratio = 0.0;
  /// E_x tau / f(x)
  double tau_ratio = 0.0;
};

std::vector<DriftSurveyRow> run_drift_survey(const ReactionNetwork& net, const std::vector<StateVector>& states,
                                             const Energy& energy, const StopRule& rule, std::size_t replicas,
                                             const SimConfig& cfg, Execution exec = Execution::Parallel);

}  // namespace crnlab
