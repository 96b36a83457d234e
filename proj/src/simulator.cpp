#include "crnlab/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace crnlab {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::TimeLimit: return "time-limit";
    case Termination::EventLimit: return "event-limit";
    case Termination::Absorbed: return "absorbed";
    case Termination::StopRule: return "stop-rule";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (!(max_time > 0.0)) throw std::invalid_argument("max_time must be positive");
  if (max_events == 0) throw std::invalid_argument("max_events must be positive");
  if (thinning.kind == Thinning::Kind::EveryK && thinning.k == 0) throw std::invalid_argument("thinning k must be positive");
  if (thinning.kind == Thinning::Kind::OnGrid && !(thinning.dt > 0.0)) {
    throw std::invalid_argument("grid step must be positive");
  }
}

namespace {

std::string describe(const StateVector& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

Gillespie::Gillespie(const ReactionNetwork& net, StateVector x0, Rng rng)
    : net_(&net), x_(std::move(x0)), rng_(std::move(rng)) {
  if (x_.size() != net.n_species()) throw StructuralError("initial state dimension mismatch");
  for (const auto& r : net.reactions()) {
    std::vector<Term> src;
    std::vector<std::pair<std::size_t, std::int64_t>> jump;
    const auto d = r.displacement();
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (r.source()[i] > 0) src.push_back({i, r.source()[i]});
      if (d[i] != 0) jump.emplace_back(i, d[i]);
    }
    sources_.push_back(std::move(src));
    jumps_.push_back(std::move(jump));
  }
  rates_.assign(net.reactions().size(), 0.0);
}

void Gillespie::refresh() {
  constexpr WideCount kMax = ~WideCount{0};
  total_ = 0.0;
  for (std::size_t r = 0; r < rates_.size(); ++r) {
    WideCount acc = 1;
    for (const auto& term : sources_[r]) {
      const Count xi = x_[term.species];
      if (xi < term.count) {
        acc = 0;
        break;
      }
      for (Count k = 0; k < term.count; ++k) {
        const WideCount factor = xi - k;
        if (acc > kMax / factor) throw CountOverflow("propensity overflows 128 bits at state " + describe(x_));
        acc *= factor;
      }
    }
    rates_[r] = acc == 0 ? 0.0 : net_->reaction(r).rate_constant() * to_double(acc);
    total_ += rates_[r];
  }
  if (!std::isfinite(total_)) throw CountOverflow("total propensity is not finite at state " + describe(x_));
  fresh_ = true;
}

double Gillespie::total_rate() {
  if (!fresh_) refresh();
  return total_;
}

Gillespie::Step Gillespie::step(double horizon) {
  if (!fresh_) refresh();
  if (total_ <= 0.0) return Step::Absorbed;
  const double h = rng_.exponential(total_);
  if (t_ + h > horizon) {
    t_ = horizon;
    return Step::Horizon;
  }
  double u = rng_.uniform() * total_;
  std::size_t chosen = rates_.size();
  for (std::size_t r = 0; r < rates_.size(); ++r) {
    if (rates_[r] <= 0.0) continue;
    chosen = r;
    if (u < rates_[r]) break;
    u -= rates_[r];
  }
  for (const auto& [i, d] : jumps_[chosen]) {
    if (d > 0 && x_[i] > std::numeric_limits<Count>::max() - static_cast<Count>(d)) {
      throw CountOverflow("copy number overflows 64 bits at state " + describe(x_));
    }
    x_[i] = static_cast<Count>(static_cast<std::int64_t>(x_[i]) + d);
  }
  t_ += h;
  ++events_;
  last_ = chosen;
  fresh_ = false;
  return Step::Fired;
}

StopRule StopRule::first_jump() { return StopRule{}; }

StopRule StopRule::nth_jump(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("nth_jump needs n >= 1");
  StopRule r;
  r.kind = Kind::NthJump;
  r.count = n;
  return r;
}

StopRule StopRule::fixed_time(double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("fixed_time needs eta >= 0");
  StopRule r;
  r.kind = Kind::FixedTime;
  r.eta = eta;
  return r;
}

StopRule StopRule::hit_set(StatePredicate predicate) {
  StopRule r;
  r.kind = Kind::HitSet;
  r.hit = std::move(predicate);
  return r;
}

StopRule StopRule::first_jump_of_type(std::vector<std::size_t> reactions, std::uint64_t count) {
  if (count == 0) throw std::invalid_argument("jump count must be >= 1");
  StopRule r;
  r.kind = Kind::FirstJumpOfType;
  r.reactions = std::move(reactions);
  r.count = count;
  return r;
}

StopRule StopRule::displacement_jump(std::vector<std::int64_t> d, std::uint64_t count) {
  if (count == 0) throw std::invalid_argument("jump count must be >= 1");
  StopRule r;
  r.kind = Kind::Displacement;
  r.displacement = std::move(d);
  r.count = count;
  return r;
}

StopRule StopRule::transition_jump(TransitionPredicate predicate, std::uint64_t count) {
  if (count == 0) throw std::invalid_argument("jump count must be >= 1");
  StopRule r;
  r.kind = Kind::Transition;
  r.transition = std::move(predicate);
  r.count = count;
  return r;
}

StopRule StopRule::composite(std::vector<StopRule> stages) {
  if (stages.empty()) throw std::invalid_argument("composite rule needs at least one stage");
  StopRule r;
  r.kind = Kind::Composite;
  r.sequence = std::move(stages);
  return r;
}

namespace {

class RuleTracker {
 public:
  explicit RuleTracker(const StopRule* rule) {
    if (rule) flatten(*rule);
  }

  bool active() const { return !stages_.empty(); }

  // Returns true if the whole rule has fired.
  bool start(double t, const StateVector& x) {
    if (!active()) return false;
    stage_ = 0;
    return begin_stage(t, x);
  }

  std::optional<double> deadline() const {
    if (!active() || stage_ >= stages_.size()) return std::nullopt;
    const auto* s = stages_[stage_];
    if (s->kind == StopRule::Kind::FixedTime) return stage_start_ + s->eta;
    return std::nullopt;
  }

  bool on_deadline(double t, const StateVector& x) { return advance(t, x); }

  bool on_event(double t, const StateVector& before, const StateVector& after, std::size_t reaction,
                const std::vector<std::int64_t>& disp) {
    if (!active()) return false;
    const auto* s = stages_[stage_];
    bool counts = false;
    switch (s->kind) {
      case StopRule::Kind::FirstJump: counts = true; break;
      case StopRule::Kind::NthJump: counts = true; break;
      case StopRule::Kind::FixedTime: return false;
      case StopRule::Kind::HitSet: return s->hit(after) ? advance(t, after) : false;
      case StopRule::Kind::FirstJumpOfType:
        counts = std::find(s->reactions.begin(), s->reactions.end(), reaction) != s->reactions.end();
        break;
      case StopRule::Kind::Displacement: counts = disp == s->displacement; break;
      case StopRule::Kind::Transition: counts = s->transition(before, after); break;
      case StopRule::Kind::Composite: break;
    }
    if (!counts) return false;
    if (++counter_ >= s->count) return advance(t, after);
    return false;
  }

 private:
  void flatten(const StopRule& r) {
    if (r.kind == StopRule::Kind::Composite) {
      for (const auto& s : r.sequence) flatten(s);
    } else {
      stages_.push_back(&r);
    }
  }

  bool begin_stage(double t, const StateVector& x) {
    counter_ = 0;
    stage_start_ = t;
    const auto* s = stages_[stage_];
    if (s->kind == StopRule::Kind::HitSet && s->hit(x)) return advance(t, x);
    if (s->kind == StopRule::Kind::FixedTime && s->eta == 0.0) return advance(t, x);
    return false;
  }

  bool advance(double t, const StateVector& x) {
    ++stage_;
    if (stage_ == stages_.size()) return true;
    return begin_stage(t, x);
  }

  std::vector<const StopRule*> stages_;
  std::size_t stage_ = 0;
  std::uint64_t counter_ = 0;
  double stage_start_ = 0.0;
};

class Recorder {
 public:
  Recorder(const Thinning& th, const StateVector& x0) : th_(th) { rec_.samples.push_back({0.0, x0}); }

  // Called before a jump at time t_new; x_old held on [last, t_new).
  bool crosses_grid(double t_new) const {
    return th_.kind == Thinning::Kind::OnGrid && static_cast<double>(next_grid_) * th_.dt < t_new;
  }

  void before_jump(double t_new, const StateVector& x_old) {
    if (th_.kind == Thinning::Kind::OnGrid) fill_grid(t_new, x_old, false);
  }

  void after_jump(double t, const StateVector& x, std::uint64_t events) {
    if (th_.kind == Thinning::Kind::EveryEvent ||
        (th_.kind == Thinning::Kind::EveryK && events % th_.k == 0)) {
      rec_.samples.push_back({t, x});
    }
  }

  TrajectoryRecord finish(double t_end, const StateVector& x, Termination term, std::uint64_t events) {
    if (th_.kind == Thinning::Kind::OnGrid) {
      fill_grid(t_end, x, true);
    } else if (t_end > rec_.samples.back().t) {
      rec_.samples.push_back({t_end, x});
    }
    rec_.termination = term;
    rec_.event_count = events;
    rec_.end_time = t_end;
    rec_.final_state = x;
    return std::move(rec_);
  }

 private:
  void fill_grid(double t, const StateVector& x, bool inclusive) {
    while (true) {
      const double g = static_cast<double>(next_grid_) * th_.dt;
      if (g > t || (!inclusive && g == t)) break;
      rec_.samples.push_back({g, x});
      ++next_grid_;
    }
  }

  Thinning th_;
  TrajectoryRecord rec_;
  std::uint64_t next_grid_ = 1;
};

RunResult run_kernel(const ReactionNetwork& net, const StateVector& x0, const StopRule* rule, const SimConfig& cfg) {
  cfg.validate();
  Gillespie g(net, x0, Rng(cfg.seed, cfg.stream));
  Recorder rec(cfg.thinning, x0);
  RuleTracker tracker(rule);
  std::vector<std::vector<std::int64_t>> disps;
  for (const auto& r : net.reactions()) disps.push_back(r.displacement());

  RunResult out;
  Termination term = Termination::TimeLimit;
  bool fired = tracker.start(0.0, x0);
  StateVector before = x0;
  while (!fired) {
    if (g.events() >= cfg.max_events) {
      term = Termination::EventLimit;
      break;
    }
    const auto deadline = tracker.deadline();
    const double horizon = deadline ? std::min(*deadline, cfg.max_time) : cfg.max_time;
    const auto step = g.step(horizon);
    if (step == Gillespie::Step::Fired) {
      const bool need_before = tracker.active() || rec.crosses_grid(g.time());
      if (need_before) {
        // Undo the jump rather than copying the state on every event.
        before = g.state();
        const auto& d = disps[g.last_reaction()];
        for (std::size_t i = 0; i < d.size(); ++i) before[i] = static_cast<Count>(static_cast<std::int64_t>(before[i]) - d[i]);
        rec.before_jump(g.time(), before);
      }
      rec.after_jump(g.time(), g.state(), g.events());
      fired = tracker.on_event(g.time(), before, g.state(), g.last_reaction(), disps[g.last_reaction()]);
    } else if (step == Gillespie::Step::Absorbed) {
      if (deadline && *deadline <= cfg.max_time) {
        // The state is frozen; a pending fixed-time stage still fires.
        fired = tracker.on_deadline(*deadline, g.state());
        if (fired) {
          out.stop_time = *deadline;
          break;
        }
        continue;
      }
      term = Termination::Absorbed;
      break;
    } else {
      if (deadline && g.time() == *deadline) {
        fired = tracker.on_deadline(g.time(), g.state());
        continue;
      }
      term = Termination::TimeLimit;
      break;
    }
  }
  if (fired) {
    term = Termination::StopRule;
    if (out.stop_time == 0.0) out.stop_time = g.time();
  } else {
    out.censored = rule != nullptr;
    out.stop_time = g.time();
  }
  // An absorbed path that fired on a later deadline stops at that deadline.
  const double t_end = std::max(out.stop_time, g.time());
  out.stop_state = g.state();
  out.record = rec.finish(t_end, g.state(), term, g.events());
  return out;
}

}  // namespace

TrajectoryRecord simulate(const ReactionNetwork& net, const StateVector& x0, const SimConfig& cfg) {
  return run_kernel(net, x0, nullptr, cfg).record;
}

RunResult run_until(const ReactionNetwork& net, const StateVector& x0, const StopRule& rule, const SimConfig& cfg) {
  return run_kernel(net, x0, &rule, cfg);
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record) {
  const std::size_t n = record.final_state.size();
  out << "t";
  for (std::size_t i = 0; i < n; ++i) out << ",x_" << (i + 1);
  out << "\n";
  char buf[64];
  for (const auto& s : record.samples) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s.t);
    out.write(buf, ptr - buf);
    for (std::size_t i = 0; i < n; ++i) out << ',' << s.x[i];
    out << "\n";
  }
  out << "# termination: " << to_string(record.termination) << ", events: " << record.event_count << "\n";
}

std::string Energy::name() const {
  switch (kind) {
    case Kind::Linear: return "linear";
    case Kind::Entropy: return "entropy";
    case Kind::Polynomial: return "polynomial";
  }
  return "unknown";
}

double Energy::operator()(const StateVector& x) const {
  double acc = 0.0;
  switch (kind) {
    case Kind::Linear:
      if (coefficients.size() != x.size()) throw std::invalid_argument("energy weight dimension mismatch");
      for (std::size_t i = 0; i < x.size(); ++i) acc += coefficients[i] * static_cast<double>(x[i]);
      return acc;
    case Kind::Entropy:
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = static_cast<double>(x[i]);
        acc += (xi > 0.0 ? xi * std::log(xi) : 0.0) - xi + 1.0;
      }
      return acc;
    case Kind::Polynomial:
      if (coefficients.size() != x.size()) throw std::invalid_argument("energy exponent dimension mismatch");
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (coefficients[i] > 0.0) acc += std::pow(static_cast<double>(x[i]), coefficients[i]);
      }
      return acc;
  }
  return acc;
}

namespace {

struct MeanErr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanErr mean_stderr(const std::vector<double>& v) {
  MeanErr m;
  if (v.empty()) return m;
  double s = 0.0;
  for (double x : v) s += x;
  m.mean = s / static_cast<double>(v.size());
  if (v.size() < 2) return m;
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return m;
}

}  // namespace

DriftEstimate estimate_drift(const ReactionNetwork& net, const StateVector& x0, const Energy& energy,
                             const StopRule& rule, std::size_t replicas, const SimConfig& cfg, Execution exec) {
  if (replicas < 2) throw std::invalid_argument("estimate_drift needs at least 2 replicas");
  const auto runs = run_replicas<RunResult>(
      replicas,
      [&](std::size_t r) {
        SimConfig c = cfg;
        c.stream = r;
        c.thinning = Thinning::every_k(std::numeric_limits<std::uint64_t>::max());
        auto res = run_until(net, x0, rule, c);
        res.record.samples.clear();
        return res;
      },
      exec);

  DriftEstimate out;
  out.energy_name = energy.name();
  out.initial_energy = energy(x0);
  std::vector<double> change, tau;
  std::size_t absorbed = 0;
  for (const auto& r : runs) {
    if (r.censored) {
      ++out.censored;
      if (r.record.termination == Termination::Absorbed) ++absorbed;
      continue;
    }
    change.push_back(energy(r.stop_state) - out.initial_energy);
    tau.push_back(r.stop_time);
  }
  if (change.empty()) {
    if (absorbed == replicas) {
      out.tau_censored = true;
      return out;
    }
    throw std::runtime_error("every replica was censored before the stop rule fired");
  }
  const auto c = mean_stderr(change);
  const auto t = mean_stderr(tau);
  out.mean_energy_change = c.mean;
  out.energy_change_stderr = c.stderr_;
  out.mean_tau = t.mean;
  out.tau_stderr = t.stderr_;
  out.drift_ratio = t.mean > 0.0 ? c.mean / t.mean : 0.0;
  out.replicas = change.size();
  return out;
}

double OccupationMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& row : mass) {
    for (double m : row) s += m;
  }
  return s;
}

std::vector<double> OccupationMeasure::state_marginal() const {
  std::vector<double> out;
  for (const auto& row : mass) {
    if (row.size() > out.size()) out.resize(row.size(), 0.0);
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
  }
  return out;
}

void OccupationMeasure::add(double t0, double t1, Count value) {
  const double s0 = t0 / time_scale;
  const double s1 = std::min(t1 / time_scale, horizon);
  if (!(s1 > s0)) return;
  const double width = horizon / static_cast<double>(time_bins);
  const auto state_bin = static_cast<std::size_t>(std::floor(static_cast<double>(value) / space_scale / state_bin_width));
  auto b = static_cast<std::size_t>(std::floor(s0 / width));
  double a = s0;
  while (a < s1 && b < time_bins) {
    const double edge = std::min(s1, static_cast<double>(b + 1) * width);
    auto& row = mass[b];
    if (row.size() <= state_bin) row.resize(state_bin + 1, 0.0);
    row[state_bin] += edge - a;
    a = edge;
    ++b;
  }
}

void OccupationMeasure::merge(const OccupationMeasure& other) {
  if (other.time_bins != time_bins) throw std::invalid_argument("occupation measures have different binning");
  for (std::size_t b = 0; b < time_bins; ++b) {
    auto& row = mass[b];
    const auto& o = other.mass[b];
    if (row.size() < o.size()) row.resize(o.size(), 0.0);
    for (std::size_t j = 0; j < o.size(); ++j) row[j] += o[j];
  }
}

OccupationMeasure occupation_measure(const ReactionNetwork& net, const StateVector& x0, const OccupationOptions& opts,
                                     const SimConfig& cfg) {
  if (!(opts.time_scale > 0.0) || !(opts.space_scale > 0.0) || !(opts.horizon > 0.0) || opts.time_bins == 0 ||
      !(opts.state_bin_width > 0.0)) {
    throw std::invalid_argument("occupation measure needs positive scales, horizon and bins");
  }
  if (opts.projection >= net.n_species()) throw std::out_of_range("projection coordinate out of range");
  OccupationMeasure occ;
  occ.time_scale = opts.time_scale;
  occ.space_scale = opts.space_scale;
  occ.horizon = opts.horizon;
  occ.time_bins = opts.time_bins;
  occ.state_bin_width = opts.state_bin_width;
  occ.mass.assign(opts.time_bins, {});

  const double raw_horizon = opts.horizon * opts.time_scale;
  Gillespie g(net, x0, Rng(cfg.seed, cfg.stream));
  occ.termination = Termination::TimeLimit;
  while (true) {
    if (g.events() >= cfg.max_events) {
      occ.termination = Termination::EventLimit;
      break;
    }
    const double t0 = g.time();
    const Count v = g.state()[opts.projection];
    const auto step = g.step(raw_horizon);
    if (step == Gillespie::Step::Absorbed) {
      occ.add(t0, raw_horizon, v);
      occ.termination = Termination::Absorbed;
      break;
    }
    occ.add(t0, g.time(), v);
    if (step == Gillespie::Step::Horizon) break;
  }
  return occ;
}

std::vector<HittingTime> hitting_time_sample(const ReactionNetwork& net, const StateVector& x0,
                                             const StatePredicate& target, std::size_t replicas,
                                             const SimConfig& cfg, Execution exec) {
  if (replicas == 0) throw std::invalid_argument("hitting_time_sample needs at least one replica");
  const auto rule = StopRule::hit_set(target);
  return run_replicas<HittingTime>(
      replicas,
      [&](std::size_t r) {
        SimConfig c = cfg;
        c.stream = r;
        c.thinning = Thinning::every_k(std::numeric_limits<std::uint64_t>::max());
        const auto res = run_until(net, x0, rule, c);
        return HittingTime{res.stop_time, res.censored};
      },
      exec);
}

}  // namespace crnlab
