#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crnlab/rational.hpp"

namespace crnlab {

using Count = std::uint64_t;
/// Falling factorials are accumulated in 128 bits before conversion to a rate.
using WideCount = unsigned __int128;

class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CountOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

struct SpeciesId {
  std::size_t index = 0;
  auto operator<=>(const SpeciesId&) const = default;
};

/// Dense vector of non-negative copy numbers. Shared storage for complexes and
/// states; the two are kept as distinct types so they cannot be mixed up.
class CountVector {
 public:
  CountVector() = default;
  explicit CountVector(std::size_t n) : counts_(n, 0) {}
  explicit CountVector(std::vector<Count> counts) : counts_(std::move(counts)) {}
  CountVector(std::initializer_list<Count> counts) : counts_(counts) {}

  std::size_t size() const { return counts_.size(); }
  Count operator[](std::size_t i) const { return counts_[i]; }
  Count& operator[](std::size_t i) { return counts_[i]; }
  std::span<const Count> counts() const { return counts_; }
  const std::vector<Count>& vec() const { return counts_; }

  /// Sum of entries. Throws CountOverflow past 2^64 - 1.
  Count norm() const;
  Count norm_inf() const;
  bool is_zero() const;

  auto operator<=>(const CountVector&) const = default;
  bool operator==(const CountVector&) const = default;

 private:
  std::vector<Count> counts_;
};

class Complex : public CountVector {
 public:
  using CountVector::CountVector;
  explicit Complex(const CountVector& v) : CountVector(v) {}
  auto operator<=>(const Complex&) const = default;
  bool operator==(const Complex&) const = default;
};

class StateVector : public CountVector {
 public:
  using CountVector::CountVector;
  explicit StateVector(const CountVector& v) : CountVector(v) {}
  auto operator<=>(const StateVector&) const = default;
  bool operator==(const StateVector&) const = default;
};

struct StateHash {
  std::size_t operator()(const CountVector& v) const noexcept;
};

class Reaction {
 public:
  /// Throws StructuralError on a self-loop, a dimension mismatch or a
  /// non-positive (or non-finite) rate constant.
  Reaction(Complex source, Complex target, double rate_constant);

  const Complex& source() const { return source_; }
  const Complex& target() const { return target_; }
  double rate_constant() const { return rate_; }

  /// target - source, one entry per species.
  std::vector<std::int64_t> displacement() const;

  bool operator==(const Reaction&) const = default;

 private:
  Complex source_;
  Complex target_;
  double rate_;
};

/// Species, complexes and reactions with their rate constants.
/// Complexes are listed in order of first appearance over the reactions
/// (source before target), unless given explicitly.
class ReactionNetwork {
 public:
  ReactionNetwork() = default;
  ReactionNetwork(std::vector<std::string> species_names, std::vector<Reaction> reactions);
  ReactionNetwork(std::vector<std::string> species_names, std::vector<Complex> complexes,
                  std::vector<Reaction> reactions);

  /// Species named S1..Sn.
  static ReactionNetwork with_default_names(std::size_t n_species, std::vector<Reaction> reactions);

  std::size_t n_species() const { return species_names_.size(); }
  const std::vector<std::string>& species_names() const { return species_names_; }
  const std::vector<Complex>& complexes() const { return complexes_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(std::size_t r) const { return reactions_.at(r); }
  std::size_t source_index(std::size_t r) const { return source_index_.at(r); }
  std::size_t target_index(std::size_t r) const { return target_index_.at(r); }

  /// y^-_max and y^+_max: largest source (target) complex size.
  Count max_source_size() const;
  Count max_target_size() const;

  /// Same topology with every rate constant replaced.
  ReactionNetwork with_rates(std::span<const double> rates) const;

  /// Structural equality: species count, complexes, reactions and rates.
  /// Species names are not compared.
  bool same_structure(const ReactionNetwork& other) const;

 private:
  void index_complexes(bool append_missing);

  std::vector<std::string> species_names_;
  std::vector<Complex> complexes_;
  std::vector<Reaction> reactions_;
  std::vector<std::size_t> source_index_;
  std::vector<std::size_t> target_index_;
};

/// x^(y) = prod_i x_i (x_i - 1) ... (x_i - y_i + 1); zero if some x_i < y_i.
WideCount falling_factorial(const CountVector& x, const CountVector& y);

/// Conversion of a falling factorial to double; exact below 2^53.
double to_double(WideCount value);

/// kappa_r * x^(y_r^-).
double propensity(const ReactionNetwork& net, std::size_t reaction_index, const StateVector& x);

/// Sum of all propensities at x.
double total_propensity(const ReactionNetwork& net, const StateVector& x);

/// x + y^+ - y^-. Throws ContractViolation when the reaction is blocked at x.
StateVector apply_jump(const StateVector& x, const Reaction& reaction);

/// Finitely supported function on N^n; unlisted states read 0.
using FiniteFunction = std::map<StateVector, double>;

/// Q(f)(x) = sum_r kappa_r x^(y_r^-) (f(x + y_r^+ - y_r^-) - f(x)).
double generator_apply(const ReactionNetwork& net, const FiniteFunction& f, const StateVector& x);

/// One enabled transition out of a state.
struct Transition {
  std::size_t reaction = 0;
  StateVector target;
  double rate = 0.0;
};

/// All transitions with strictly positive rate out of x.
std::vector<Transition> enabled_transitions(const ReactionNetwork& net, const StateVector& x);

struct ConservationLaws {
  /// Basis of {rho : <rho, y_r^+ - y_r^-> = 0 for all r}, cleared to integers.
  std::vector<std::vector<Integer>> basis;
  /// A strictly positive member of the span, if the bounded search found one.
  std::optional<std::vector<Integer>> positive;
  /// Coefficient bound used by the search; "not found" only means not found
  /// within this bound.
  int search_bound = 0;
};

ConservationLaws conservation_vectors(const ReactionNetwork& net, int search_bound = 3);

/// <rho, x> in exact integer arithmetic.
Integer dot(const std::vector<Integer>& rho, const CountVector& x);

}  // namespace crnlab
