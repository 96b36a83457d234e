#include "crnlab/structural.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>

#include <Eigen/Dense>

namespace crnlab {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

RationalMatrix displacement_rows(const ReactionNetwork& net) {
  RationalMatrix rows;
  for (const auto& r : net.reactions()) {
    RationalVector row;
    for (auto d : r.displacement()) row.emplace_back(d);
    rows.push_back(std::move(row));
  }
  return rows;
}

// reach[i][j]: complex j reachable from complex i along reaction edges.
std::vector<std::vector<bool>> reachability(const ReactionNetwork& net) {
  const std::size_t c = net.complexes().size();
  std::vector<std::vector<std::size_t>> adj(c);
  for (std::size_t r = 0; r < net.reactions().size(); ++r) adj[net.source_index(r)].push_back(net.target_index(r));
  std::vector<std::vector<bool>> reach(c, std::vector<bool>(c, false));
  for (std::size_t s = 0; s < c; ++s) {
    std::deque<std::size_t> queue{s};
    reach[s][s] = true;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (auto v : adj[u]) {
        if (!reach[s][v]) {
          reach[s][v] = true;
          queue.push_back(v);
        }
      }
    }
  }
  return reach;
}

}  // namespace

StructuralReport analyze(const ReactionNetwork& net) {
  StructuralReport out;
  const std::size_t c = net.complexes().size();
  out.complex_count = c;

  std::vector<std::size_t> parent(c);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t r = 0; r < net.reactions().size(); ++r) {
    const auto a = find_root(parent, net.source_index(r));
    const auto b = find_root(parent, net.target_index(r));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<std::size_t>> classes;
  std::vector<long> slot(c, -1);
  for (std::size_t i = 0; i < c; ++i) {
    const auto root = find_root(parent, i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(classes.size());
      classes.emplace_back();
    }
    classes[slot[root]].push_back(i);
  }
  out.linkage_classes = std::move(classes);

  const auto reach = reachability(net);
  out.weakly_reversible = true;
  for (std::size_t r = 0; r < net.reactions().size(); ++r) {
    if (!reach[net.target_index(r)][net.source_index(r)]) {
      out.weakly_reversible = false;
      break;
    }
  }

  out.stoich_rank = rank(displacement_rows(net), net.n_species());
  out.deficiency = static_cast<long>(c) - static_cast<long>(out.linkage_classes.size()) -
                   static_cast<long>(out.stoich_rank);
  return out;
}

std::vector<double> mass_action_field(const ReactionNetwork& net, const std::vector<double>& x) {
  const std::size_t n = net.n_species();
  if (x.size() != n) throw StructuralError("mass_action_field: dimension mismatch");
  std::vector<double> dx(n, 0.0);
  for (const auto& r : net.reactions()) {
    double rate = r.rate_constant();
    for (std::size_t i = 0; i < n; ++i) {
      if (r.source()[i] > 0) rate *= std::pow(x[i], static_cast<double>(r.source()[i]));
    }
    const auto d = r.displacement();
    for (std::size_t i = 0; i < n; ++i) dx[i] += rate * static_cast<double>(d[i]);
  }
  return dx;
}

std::vector<double> mass_action_jacobian(const ReactionNetwork& net, const std::vector<double>& x) {
  const std::size_t n = net.n_species();
  if (x.size() != n) throw StructuralError("mass_action_jacobian: dimension mismatch");
  std::vector<double> jac(n * n, 0.0);
  for (const auto& r : net.reactions()) {
    const auto d = r.displacement();
    for (std::size_t k = 0; k < n; ++k) {
      const Count yk = r.source()[k];
      if (yk == 0) continue;
      // d/dx_k of kappa prod_i x_i^{y_i}
      double g = r.rate_constant() * static_cast<double>(yk) * std::pow(x[k], static_cast<double>(yk - 1));
      for (std::size_t i = 0; i < n; ++i) {
        if (i != k && r.source()[i] > 0) g *= std::pow(x[i], static_cast<double>(r.source()[i]));
      }
      for (std::size_t i = 0; i < n; ++i) jac[i * n + k] += g * static_cast<double>(d[i]);
    }
  }
  return jac;
}

std::vector<double> deterministic_equilibrium(const ReactionNetwork& net, std::vector<double> guess,
                                              const EquilibriumOptions& opts) {
  const auto report = analyze(net);
  if (!report.weakly_reversible || report.deficiency != 0) {
    throw PreconditionRefused("deterministic equilibrium needs a weakly reversible network with deficiency 0 (got " +
                              std::string(report.weakly_reversible ? "" : "not ") + "weakly reversible, deficiency " +
                              std::to_string(report.deficiency) + ")");
  }
  const std::size_t n = net.n_species();
  if (guess.size() != n) throw StructuralError("initial guess dimension mismatch");
  for (double g : guess) {
    if (!(g > 0.0)) throw std::invalid_argument("initial guess must be strictly positive");
  }

  // Complex balancing: a positive kernel vector psi of the Laplacian on each
  // linkage class, then c with c^y = psi_y up to one factor per class.
  const std::size_t m = net.complexes().size();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t r = 0; r < net.reactions().size(); ++r) {
    const auto src = net.source_index(r);
    const auto dst = net.target_index(r);
    const double k = net.reaction(r).rate_constant();
    lap(dst, src) += k;
    lap(src, src) -= k;
  }
  const std::size_t classes = report.linkage_classes.size();
  Eigen::VectorXd log_psi(m);
  for (const auto& members : report.linkage_classes) {
    const auto sz = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd sub(sz, sz);
    for (Eigen::Index i = 0; i < sz; ++i) {
      for (Eigen::Index j = 0; j < sz; ++j) sub(i, j) = lap(members[i], members[j]);
    }
    const Eigen::MatrixXd kernel = sub.fullPivLu().kernel();
    Eigen::VectorXd v = kernel.col(0);
    if (v.sum() < 0) v = -v;
    for (Eigen::Index i = 0; i < sz; ++i) {
      if (!(v(i) > 0.0)) throw NonConvergence("Laplacian kernel is not positive", std::vector<double>(n, 0.0));
      log_psi(members[i]) = std::log(v(i));
    }
  }
  // Unknowns: log c (n entries) and one offset per linkage class.
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m, n + classes);
  for (std::size_t l = 0; l < classes; ++l) {
    for (auto j : report.linkage_classes[l]) {
      for (std::size_t i = 0; i < n; ++i) sys(j, i) = double(net.complexes()[j][i]);
      sys(j, n + l) = -1.0;
    }
  }
  const Eigen::VectorXd sol = sys.completeOrthogonalDecomposition().solve(log_psi);
  if ((sys * sol - log_psi).lpNorm<Eigen::Infinity>() > 1e-8) {
    throw NonConvergence("complex-balance system has no solution", std::vector<double>(n, 0.0));
  }
  const Eigen::VectorXd log_c = sol.head(n);

  // Positive equilibria are c exp(B^T mu); pick the one in the class of the
  // guess by damped Newton on the convex potential.
  const auto laws = conservation_vectors(net);
  const std::size_t d = laws.basis.size();
  Eigen::MatrixXd B(d, n);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) B(k, i) = laws.basis[k][i].convert_to<double>();
  }
  Eigen::Map<const Eigen::VectorXd> g0(guess.data(), n);
  const Eigen::VectorXd target = B * g0;
  auto point = [&](const Eigen::VectorXd& mu) -> Eigen::VectorXd {
    return (log_c + B.transpose() * mu).array().exp().matrix();
  };
  // Potential whose gradient is B x(mu) - target.
  auto potential = [&](const Eigen::VectorXd& mu) { return point(mu).sum() - target.dot(mu); };

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd x = point(mu);
  Eigen::VectorXd grad = B * x - target;
  const double scale = std::max(1.0, target.lpNorm<Eigen::Infinity>());
  for (int it = 0; it < opts.max_iterations && grad.lpNorm<Eigen::Infinity>() > opts.tolerance * scale; ++it) {
    const Eigen::MatrixXd hess = B * x.asDiagonal() * B.transpose();
    const Eigen::VectorXd step = hess.ldlt().solve(-grad);
    const double f0 = potential(mu);
    double lambda = 1.0;
    const double g0norm = grad.norm();
    // Armijo on the potential; near the solution its decrease drowns in
    // rounding, so a smaller gradient also counts.
    while (lambda > 1e-12 && potential(mu + lambda * step) > f0 + 1e-4 * lambda * grad.dot(step) &&
           (B * point(mu + lambda * step) - target).norm() >= g0norm) {
      lambda *= 0.5;
    }
    mu += lambda * step;
    x = point(mu);
    grad = B * x - target;
  }
  std::vector<double> out(x.data(), x.data() + n);
  if (grad.lpNorm<Eigen::Infinity>() > opts.tolerance * scale) {
    throw NonConvergence("equilibrium did not reach the requested class", out);
  }
  const auto f = mass_action_field(net, out);
  double fmax = 0.0;
  for (double v : f) fmax = std::max(fmax, std::abs(v));
  if (fmax > opts.tolerance * std::max(1.0, x.lpNorm<Eigen::Infinity>())) throw NonConvergence("equilibrium residual too large", out);
  return out;
}

bool Window::contains(const StateVector& x) const {
  if (x.size() != upper.size()) return false;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (x[i] > upper[i]) return false;
  }
  return true;
}

std::size_t Window::size() const {
  std::size_t s = 1;
  for (auto u : upper) s *= static_cast<std::size_t>(u + 1);
  return s;
}

namespace {

template <class F>
void for_each_state(const Window& w, F&& f) {
  StateVector x(w.upper.size());
  if (w.upper.empty()) return;
  while (true) {
    f(x);
    std::size_t i = 0;
    while (i < x.size() && x[i] == w.upper[i]) x[i++] = 0;
    if (i == x.size()) return;
    ++x[i];
  }
}

// Predecessors of z: pairs (x, rate of x -> z) over all reactions.
std::vector<std::pair<StateVector, double>> predecessors(const ReactionNetwork& net, const StateVector& z) {
  std::vector<std::pair<StateVector, double>> out;
  for (std::size_t r = 0; r < net.reactions().size(); ++r) {
    const auto& rx = net.reaction(r);
    StateVector x(z.size());
    bool ok = true;
    for (std::size_t i = 0; i < z.size() && ok; ++i) {
      if (z[i] < rx.target()[i]) {
        ok = false;
      } else {
        x[i] = z[i] - rx.target()[i] + rx.source()[i];
      }
    }
    if (!ok) continue;
    out.emplace_back(x, propensity(net, r, x));
  }
  return out;
}

}  // namespace

ProductFormMeasure::ProductFormMeasure(std::vector<double> equilibrium) : c_(std::move(equilibrium)) {
  for (double c : c_) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("equilibrium must be strictly positive");
    log_c_.push_back(std::log(c));
  }
}

double ProductFormMeasure::log_weight(const StateVector& x) const {
  if (x.size() != c_.size()) throw StructuralError("product-form measure: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = static_cast<double>(x[i]);
    acc += xi * log_c_[i] - std::lgamma(xi + 1.0);
  }
  return acc;
}

double ProductFormMeasure::weight(const StateVector& x) const { return std::exp(log_weight(x)); }

TruncatedClass ProductFormMeasure::truncated_class(const ReactionNetwork& net, const StateVector& base,
                                                   const Window& window) const {
  if (window.upper.size() != c_.size()) throw std::invalid_argument("window dimension mismatch");
  if (!window.contains(base)) throw std::invalid_argument("truncation window is empty or misses the base state");

  auto bfs = [&](bool forward) {
    std::set<StateVector> seen{base};
    std::deque<StateVector> queue{base};
    while (!queue.empty()) {
      const StateVector x = queue.front();
      queue.pop_front();
      std::vector<StateVector> next;
      if (forward) {
        for (const auto& t : enabled_transitions(net, x)) next.push_back(t.target);
      } else {
        for (const auto& [p, rate] : predecessors(net, x)) {
          if (rate > 0.0) next.push_back(p);
        }
      }
      for (auto& y : next) {
        if (window.contains(y) && seen.insert(y).second) queue.push_back(y);
      }
    }
    return seen;
  };
  const auto fwd = bfs(true);
  const auto bwd = bfs(false);

  TruncatedClass out;
  std::set_intersection(fwd.begin(), fwd.end(), bwd.begin(), bwd.end(), std::back_inserter(out.states));
  if (out.states.empty()) throw std::invalid_argument("truncated class is empty");

  double max_log = -INFINITY;
  std::vector<double> logs;
  for (const auto& s : out.states) {
    logs.push_back(log_weight(s));
    max_log = std::max(max_log, logs.back());
  }
  double total = 0.0;
  for (double l : logs) total += std::exp(l - max_log);
  bool leaks = false;
  for (std::size_t k = 0; k < out.states.size(); ++k) {
    out.probability.push_back(std::exp(logs[k] - max_log) / total);
    for (const auto& t : enabled_transitions(net, out.states[k])) {
      if (!window.contains(t.target)) {
        out.boundary_leak += out.probability.back();
        leaks = true;
        break;
      }
    }
  }
  out.normalizable = !leaks;
  return out;
}

double stationarity_residual(const ReactionNetwork& net, const ProductFormMeasure& measure, const Window& window) {
  double worst = 0.0;
  for_each_state(window, [&](const StateVector& z) {
    const double exit = total_propensity(net, z);
    if (exit <= 0.0) return;
    const auto preds = predecessors(net, z);
    for (const auto& [x, rate] : preds) {
      if (!window.contains(x)) return;
    }
    const double lz = measure.log_weight(z);
    double inflow = 0.0;
    for (const auto& [x, rate] : preds) {
      if (rate > 0.0) inflow += std::exp(measure.log_weight(x) - lz) * rate;
    }
    worst = std::max(worst, std::abs(inflow - exit) / exit);
  });
  return worst;
}

std::string to_string(TriangleVerdict v) {
  switch (v) {
    case TriangleVerdict::DeficiencyZero: return "deficiency-zero";
    case TriangleVerdict::FiniteConserved: return "finite-conserved";
    case TriangleVerdict::Reduced1d: return "reduced-1d";
  }
  return "unknown";
}

StateVector TriangularReduction::psi(Count k) const {
  if (!anchor) throw ContractViolation("psi needs a reduced-1d reduction");
  StateVector x(anchor->size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (*anchor)[i] + k * delta[i].convert_to<Count>();
  return x;
}

double TriangularReduction::rate(const ReactionNetwork& net, int j, Count k) const {
  if (j < 0 || j > 2) throw std::out_of_range("jump index must be 0, 1 or 2");
  return propensity(net, edge_reaction[j], psi(k));
}

TriangularReduction triangular_reduce(const ReactionNetwork& net, std::optional<StateVector> base_state) {
  const auto& cx = net.complexes();
  if (cx.size() != 3 || net.reactions().size() != 3) {
    throw PreconditionRefused("not triangular: need exactly 3 complexes and 3 reactions");
  }
  std::array<long, 3> next{-1, -1, -1};
  std::array<std::size_t, 3> edge{};
  for (std::size_t r = 0; r < 3; ++r) {
    const auto s = net.source_index(r);
    if (next[s] >= 0) throw PreconditionRefused("not triangular: complex with two outgoing reactions");
    next[s] = static_cast<long>(net.target_index(r));
    edge[s] = r;
  }
  if (next[0] < 0 || next[1] < 0 || next[2] < 0 || next[next[next[0]]] != 0 || next[0] == 0 || next[next[0]] == 0) {
    throw PreconditionRefused("not triangular: reactions do not form a 3-cycle");
  }

  std::array<std::size_t, 3> cycle{0, static_cast<std::size_t>(next[0]), static_cast<std::size_t>(next[next[0]])};
  const std::size_t n = net.n_species();
  auto diff = [&](std::size_t a, std::size_t b) {
    RationalVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = Rational(Integer(cx[b][i]) - Integer(cx[a][i]));
    return v;
  };

  TriangularReduction out;
  std::array<RationalVector, 3> d{diff(cycle[0], cycle[1]), diff(cycle[1], cycle[2]), diff(cycle[2], cycle[0])};
  if (rank({d[0], d[1]}, n) == 2) {
    out.verdict = TriangleVerdict::DeficiencyZero;
    out.cycle = cycle;
    for (int j = 0; j < 3; ++j) out.edge_reaction[j] = edge[cycle[j]];
    return out;
  }

  std::vector<Integer> u = clear_denominators(d[0]);
  const bool has_pos = std::any_of(u.begin(), u.end(), [](const Integer& e) { return e > 0; });
  const bool has_neg = std::any_of(u.begin(), u.end(), [](const Integer& e) { return e < 0; });
  const bool mixed = has_pos && has_neg;
  if (!has_pos) {
    for (auto& e : u) e = -e;
  }
  const std::size_t pivot = static_cast<std::size_t>(
      std::find_if(u.begin(), u.end(), [](const Integer& e) { return e != 0; }) - u.begin());
  std::array<long, 3> p{};
  for (int j = 0; j < 3; ++j) {
    const Rational ratio = d[j][pivot] / Rational(u[pivot]);
    p[j] = numerator(ratio).convert_to<long>();
  }
  // Rotate so that p1 > 0 and p3 < 0 (hence p1 + p2 > 0).
  int start = 0;
  for (int j = 0; j < 3; ++j) {
    if (p[j] > 0 && p[(j + 2) % 3] < 0) start = j;
  }
  for (int j = 0; j < 3; ++j) {
    out.cycle[j] = cycle[(start + j) % 3];
    out.edge_reaction[j] = edge[out.cycle[j]];
  }
  out.p1 = p[start];
  out.p2 = p[(start + 1) % 3];
  out.p3 = p[(start + 2) % 3];
  out.delta = u;

  if (mixed) {
    out.verdict = TriangleVerdict::FiniteConserved;
    out.rho = conservation_vectors(net).positive;
    return out;
  }

  out.verdict = TriangleVerdict::Reduced1d;
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] == 0) out.constant_species.push_back(i);
  }
  StateVector y = base_state.value_or(StateVector(n));
  if (y.size() != n) throw StructuralError("base state dimension mismatch");
  Count k = std::numeric_limits<Count>::max();
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] > 0) k = std::min(k, y[i] / u[i].convert_to<Count>());
  }
  StateVector a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = y[i] - k * u[i].convert_to<Count>();
  out.anchor = a;
  return out;
}

ReactionNetwork shift_complexes(const ReactionNetwork& net, SpeciesId s) {
  if (s.index >= net.n_species()) throw std::out_of_range("species index out of range");
  auto shift = [&](const Complex& c) {
    if (c[s.index] == 0) {
      throw PreconditionRefused("cannot shift: a complex has no copy of " + net.species_names()[s.index]);
    }
    Complex out = c;
    --out[s.index];
    return out;
  };
  std::vector<Complex> complexes;
  for (const auto& c : net.complexes()) complexes.push_back(shift(c));
  std::vector<Reaction> reactions;
  for (const auto& r : net.reactions()) reactions.emplace_back(shift(r.source()), shift(r.target()), r.rate_constant());
  return ReactionNetwork(net.species_names(), std::move(complexes), std::move(reactions));
}

}  // namespace crnlab
