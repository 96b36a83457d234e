#include "crnlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crnlab {

namespace {

void require_same_size(const CountVector& x, const CountVector& y, const char* what) {
  if (x.size() != y.size()) {
    throw StructuralError(std::string(what) + ": dimension mismatch (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
  }
}

constexpr WideCount kWideMax = ~WideCount{0};

}  // namespace

Count CountVector::norm() const {
  Count total = 0;
  for (Count c : counts_) {
    if (total > std::numeric_limits<Count>::max() - c) throw CountOverflow("state norm overflows 64 bits");
    total += c;
  }
  return total;
}

Count CountVector::norm_inf() const {
  Count m = 0;
  for (Count c : counts_) m = std::max(m, c);
  return m;
}

bool CountVector::is_zero() const {
  return std::all_of(counts_.begin(), counts_.end(), [](Count c) { return c == 0; });
}

std::size_t StateHash::operator()(const CountVector& v) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (Count c : v.counts()) {
    h ^= c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Reaction::Reaction(Complex source, Complex target, double rate_constant)
    : source_(std::move(source)), target_(std::move(target)), rate_(rate_constant) {
  require_same_size(source_, target_, "reaction");
  if (source_ == target_) throw StructuralError("reaction source equals target (self-loop)");
  if (!(rate_constant > 0.0) || !std::isfinite(rate_constant)) {
    throw StructuralError("rate constant must be positive and finite");
  }
}

std::vector<std::int64_t> Reaction::displacement() const {
  std::vector<std::int64_t> d(source_.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = static_cast<std::int64_t>(target_[i]) - static_cast<std::int64_t>(source_[i]);
  }
  return d;
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species_names, std::vector<Reaction> reactions)
    : species_names_(std::move(species_names)), reactions_(std::move(reactions)) {
  index_complexes(true);
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species_names, std::vector<Complex> complexes,
                                 std::vector<Reaction> reactions)
    : species_names_(std::move(species_names)),
      complexes_(std::move(complexes)),
      reactions_(std::move(reactions)) {
  for (std::size_t i = 0; i < complexes_.size(); ++i) {
    if (complexes_[i].size() != n_species()) throw StructuralError("complex dimension mismatch");
    for (std::size_t j = 0; j < i; ++j) {
      if (complexes_[i] == complexes_[j]) throw StructuralError("complexes must be pairwise distinct");
    }
  }
  index_complexes(false);
}

ReactionNetwork ReactionNetwork::with_default_names(std::size_t n_species, std::vector<Reaction> reactions) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n_species; ++i) names.push_back("S" + std::to_string(i + 1));
  return ReactionNetwork(std::move(names), std::move(reactions));
}

void ReactionNetwork::index_complexes(bool append_missing) {
  auto locate = [this, append_missing](const Complex& c) {
    if (c.size() != n_species()) throw StructuralError("reaction complex dimension mismatch");
    auto it = std::find(complexes_.begin(), complexes_.end(), c);
    if (it != complexes_.end()) return static_cast<std::size_t>(it - complexes_.begin());
    if (!append_missing) throw StructuralError("reaction endpoint is not a listed complex");
    complexes_.push_back(c);
    return complexes_.size() - 1;
  };
  source_index_.clear();
  target_index_.clear();
  for (const auto& r : reactions_) {
    source_index_.push_back(locate(r.source()));
    target_index_.push_back(locate(r.target()));
  }
}

Count ReactionNetwork::max_source_size() const {
  Count m = 0;
  for (const auto& r : reactions_) m = std::max(m, r.source().norm());
  return m;
}

Count ReactionNetwork::max_target_size() const {
  Count m = 0;
  for (const auto& r : reactions_) m = std::max(m, r.target().norm());
  return m;
}

ReactionNetwork ReactionNetwork::with_rates(std::span<const double> rates) const {
  if (rates.size() != reactions_.size()) throw StructuralError("rate vector length mismatch");
  std::vector<Reaction> rs;
  rs.reserve(reactions_.size());
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    rs.emplace_back(reactions_[r].source(), reactions_[r].target(), rates[r]);
  }
  return ReactionNetwork(species_names_, complexes_, std::move(rs));
}

bool ReactionNetwork::same_structure(const ReactionNetwork& other) const {
  return n_species() == other.n_species() && complexes_ == other.complexes_ && reactions_ == other.reactions_;
}

WideCount falling_factorial(const CountVector& x, const CountVector& y) {
  require_same_size(x, y, "falling_factorial");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < y[i]) return 0;
  }
  WideCount acc = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (Count k = 0; k < y[i]; ++k) {
      const WideCount factor = x[i] - k;
      if (acc > kWideMax / factor) throw CountOverflow("falling factorial exceeds 128 bits");
      acc *= factor;
    }
  }
  return acc;
}

double to_double(WideCount value) {
  const auto hi = static_cast<std::uint64_t>(value >> 64);
  const auto lo = static_cast<std::uint64_t>(value);
  return std::ldexp(static_cast<double>(hi), 64) + static_cast<double>(lo);
}

double propensity(const ReactionNetwork& net, std::size_t reaction_index, const StateVector& x) {
  const auto& r = net.reaction(reaction_index);
  return r.rate_constant() * to_double(falling_factorial(x, r.source()));
}

double total_propensity(const ReactionNetwork& net, const StateVector& x) {
  double total = 0.0;
  for (std::size_t r = 0; r < net.reactions().size(); ++r) total += propensity(net, r, x);
  return total;
}

StateVector apply_jump(const StateVector& x, const Reaction& reaction) {
  require_same_size(x, reaction.source(), "apply_jump");
  StateVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < reaction.source()[i]) {
      throw ContractViolation("apply_jump on a reaction with zero propensity");
    }
    const Count base = x[i] - reaction.source()[i];
    if (base > std::numeric_limits<Count>::max() - reaction.target()[i]) {
      throw CountOverflow("copy number overflows 64 bits");
    }
    out[i] = base + reaction.target()[i];
  }
  return out;
}

std::vector<Transition> enabled_transitions(const ReactionNetwork& net, const StateVector& x) {
  std::vector<Transition> out;
  for (std::size_t r = 0; r < net.reactions().size(); ++r) {
    const double rate = propensity(net, r, x);
    if (rate > 0.0) out.push_back({r, apply_jump(x, net.reaction(r)), rate});
  }
  return out;
}

double generator_apply(const ReactionNetwork& net, const FiniteFunction& f, const StateVector& x) {
  auto value = [&f](const StateVector& s) {
    auto it = f.find(s);
    return it == f.end() ? 0.0 : it->second;
  };
  const double fx = value(x);
  double acc = 0.0;
  for (const auto& t : enabled_transitions(net, x)) acc += t.rate * (value(t.target) - fx);
  return acc;
}

Integer dot(const std::vector<Integer>& rho, const CountVector& x) {
  if (rho.size() != x.size()) throw StructuralError("dot: dimension mismatch");
  Integer acc = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) acc += rho[i] * Integer(x[i]);
  return acc;
}

namespace {

std::optional<std::vector<Integer>> search_positive(const std::vector<std::vector<Integer>>& basis, int bound) {
  const std::size_t d = basis.size();
  if (d == 0) return std::nullopt;
  const std::size_t n = basis.front().size();
  // (2B+1)^d combinations; shrink the bound for large null spaces.
  while (bound > 1 && std::pow(2.0 * bound + 1.0, static_cast<double>(d)) > 2e6) --bound;

  std::vector<int> coeff(d, -bound);
  while (true) {
    std::vector<Integer> v(n, Integer(0));
    for (std::size_t k = 0; k < d; ++k) {
      if (coeff[k] == 0) continue;
      for (std::size_t i = 0; i < n; ++i) v[i] += coeff[k] * basis[k][i];
    }
    if (std::all_of(v.begin(), v.end(), [](const Integer& e) { return e > 0; })) {
      const Integer g = gcd_of(v);
      for (auto& e : v) e /= g;
      return v;
    }
    std::size_t k = 0;
    while (k < d && coeff[k] == bound) coeff[k++] = -bound;
    if (k == d) break;
    ++coeff[k];
  }
  return std::nullopt;
}

}  // namespace

ConservationLaws conservation_vectors(const ReactionNetwork& net, int search_bound) {
  const std::size_t n = net.n_species();
  RationalMatrix rows;
  for (const auto& r : net.reactions()) {
    RationalVector row;
    for (auto d : r.displacement()) row.emplace_back(d);
    rows.push_back(std::move(row));
  }
  ConservationLaws out;
  out.search_bound = search_bound;
  for (const auto& v : null_space(std::move(rows), n)) out.basis.push_back(clear_denominators(v));
  out.positive = search_positive(out.basis, search_bound);
  return out;
}

}  // namespace crnlab
