#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crnlab/core.hpp"

namespace crnlab {

/// Raised when an operation's structural precondition does not hold
/// (e.g. asking for a product-form measure of a deficiency-one network).
class PreconditionRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::vector<double> last_iterate)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

struct StructuralReport {
  std::size_t complex_count = 0;
  /// Complex indices of each linkage class, in order of smallest member.
  std::vector<std::vector<std::size_t>> linkage_classes;
  bool weakly_reversible = false;
  std::size_t stoich_rank = 0;
  long deficiency = 0;
};

StructuralReport analyze(const ReactionNetwork& net);

/// Deterministic mass-action vector field: sum_r kappa_r x^{y_r^-} (y_r^+ - y_r^-),
/// with ordinary powers.
std::vector<double> mass_action_field(const ReactionNetwork& net, const std::vector<double>& x);

/// Jacobian of mass_action_field, row-major n x n.
std::vector<double> mass_action_jacobian(const ReactionNetwork& net, const std::vector<double>& x);

struct EquilibriumOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;
};

/// Positive equilibrium in the stoichiometric class of initial_guess.
/// Throws PreconditionRefused unless weakly reversible with deficiency zero,
/// NonConvergence (carrying the last iterate) otherwise.
std::vector<double> deterministic_equilibrium(const ReactionNetwork& net, std::vector<double> initial_guess,
                                              const EquilibriumOptions& opts = {});

/// Box [0, upper_i] in N^n.
struct Window {
  std::vector<Count> upper;
  bool contains(const StateVector& x) const;
  std::size_t size() const;
};

struct TruncatedClass {
  std::vector<StateVector> states;
  std::vector<double> probability;  // normalized over states
  /// Normalized mass of class states with a transition leaving the window.
  double boundary_leak = 0.0;
  /// True only when no transition leaves the window, i.e. the class is
  /// finite and fully enumerated.
  bool normalizable = false;
};

/// pi(x) = prod_i c_i^{x_i} / x_i!, kept in log space.
class ProductFormMeasure {
 public:
  explicit ProductFormMeasure(std::vector<double> equilibrium);

  const std::vector<double>& equilibrium() const { return c_; }
  double log_weight(const StateVector& x) const;
  double weight(const StateVector& x) const;

  /// Irreducible class of base inside the window (states reachable from base
  /// and back, staying in the window), with the measure normalized on it.
  /// Throws std::invalid_argument if the window or the class is empty.
  TruncatedClass truncated_class(const ReactionNetwork& net, const StateVector& base, const Window& window) const;

 private:
  std::vector<double> c_;
  std::vector<double> log_c_;
};

/// Max over window states z whose predecessors all lie in the window of
/// |sum_x pi(x) q(x,z) - pi(z) q(z)| / (pi(z) q(z)). States with q(z) = 0 are
/// skipped.
double stationarity_residual(const ReactionNetwork& net, const ProductFormMeasure& measure, const Window& window);

enum class TriangleVerdict { DeficiencyZero, FiniteConserved, Reduced1d };

std::string to_string(TriangleVerdict v);

struct TriangularReduction {
  TriangleVerdict verdict = TriangleVerdict::DeficiencyZero;
  /// Cycle order y1 -> y2 -> y3 -> y1 as complex indices, and the reaction
  /// index of each edge.
  std::array<std::size_t, 3> cycle{};
  std::array<std::size_t, 3> edge_reaction{};
  /// Primitive integer vector; y2 - y1 = p1 Delta, y3 - y2 = p2 Delta.
  std::vector<Integer> delta;
  long p1 = 0, p2 = 0, p3 = 0;
  /// Positive conserved vector (finite-conserved verdict only).
  std::optional<std::vector<Integer>> rho;
  /// Species with Delta_i = 0; constant along the reduced chain.
  std::vector<std::size_t> constant_species;
  /// Anchor a of the line H_a = {a + k Delta}; set for reduced-1d.
  std::optional<StateVector> anchor;

  /// Psi_a(k) = a + k Delta.
  StateVector psi(Count k) const;
  /// Rate of the j-th jump (j = 0: +p1, 1: +p2, 2: -(p1+p2)) of the 1-D chain
  /// at level k, i.e. kappa_j Psi_a(k)^{(y_j)}.
  double rate(const ReactionNetwork& net, int j, Count k) const;
};

/// Reduction of a three-complex cycle to a 1-D chain. base_state picks the
/// line H_a (defaults to the zero state). Throws PreconditionRefused if the
/// network is not triangular.
TriangularReduction triangular_reduce(const ReactionNetwork& net, std::optional<StateVector> base_state = {});

/// Subtracts e_i from every complex; rates unchanged. Throws
/// PreconditionRefused if some complex has no copy of species i.
ReactionNetwork shift_complexes(const ReactionNetwork& net, SpeciesId i);

}  // namespace crnlab
