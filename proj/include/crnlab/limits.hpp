#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "crnlab/core.hpp"

namespace crnlab {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Vector-valued function of time on [0, t_end) (or [0, t_end] when the end
/// is closed). Evaluation outside the domain throws DomainError.
class LimitCurve {
 public:
  using Fn = std::function<std::vector<double>(double)>;

  LimitCurve() = default;
  LimitCurve(Fn f, double t_end, bool closed_end = false, std::map<std::string, double> params = {});

  std::vector<double> operator()(double t) const;
  double component(double t, std::size_t i) const { return (*this)(t).at(i); }

  double t_end() const { return t_end_; }
  bool closed_end() const { return closed_; }
  bool in_domain(double t) const;
  /// Set when an integrated curve was cut short by blow-up or NaN.
  bool truncated() const { return truncated_; }
  const std::map<std::string, double>& parameters() const { return params_; }

  void mark_truncated() { truncated_ = true; }

 private:
  Fn f_;
  double t_end_ = 0.0;
  bool closed_ = false;
  bool truncated_ = false;
  std::map<std::string, double> params_;
};

/// CSV "t,v_1,...,v_m" on the given grid.
std::string curve_csv(const LimitCurve& curve, const std::vector<double>& grid);

using VectorField = std::function<std::vector<double>(const std::vector<double>&)>;

struct OdeOptions {
  double dt = 1e-3;
  double blow_up_ceiling = 1e9;
};

/// Fixed-step RK4 from x0 over [0, t_end], cubic Hermite between nodes. If a
/// component becomes non-finite or exceeds the ceiling in absolute value, the
/// domain ends at the last good node and the curve is flagged truncated.
LimitCurve integrate_field(const VectorField& field, std::vector<double> x0, double t_end, const OdeOptions& opts = {});

LimitCurve integrate_mass_action_ode(const ReactionNetwork& net, std::vector<double> x0, double t_end,
                                     const OdeOptions& opts = {});

/// Keeps only reactions whose source size equals the largest source size.
ReactionNetwork dominant_subnetwork(const ReactionNetwork& net);

LimitCurve integrate_dominant_ode(const ReactionNetwork& net, std::vector<double> x0, double t_end,
                                  const OdeOptions& opts = {});

/// Rate constants of the triangle S2 -> S1+S2 (k2), S1+S2 -> S1 (k12), S1 -> S2 (k1).
struct TriangleRates {
  double k1 = 1.0;
  double k2 = 1.0;
  double k12 = 1.0;
};

enum class TriangleRegime { A, B, C };

/// Regime a: (x1, x2 e^{-k12 x1 t}) from x0 = (x1, x2).
/// Regime b: x1' = k2 x2, x2' = -k12 x1 x2 from x0 = (beta, 1), integrated
/// over [0, t_end].
/// Regime c: x1(0) e^{-k1 t}, one component.
LimitCurve triangle_regime_curve(TriangleRegime kind, const TriangleRates& k, const std::vector<double>& x0,
                                 double t_end = 10.0, const OdeOptions& opts = {});

/// Limits for the network 0 -> S1+S2, S2 -> 0, pS1+qS2 -> (q+1)S2 -> qS2
/// started near (delta N, (1-delta) N / p).
class AgazziCurves {
 public:
  AgazziCurves(int p, int q, double kappa3, double kappa4, double delta = 1.0);

  double y1(double t) const;
  double y2(double t) const;
  /// phi(t) = int_0^t p^q / (1 - y1(s))^q ds. Finite only for delta < 1.
  double phi(double t) const;
  /// Inverse of phi by bisection to 1e-10.
  double phi_inverse(double s) const;
  /// 1 / (1 + kappa4 q t)^{1/q}.
  double final_decay(double t) const;

  LimitCurve y_curve() const;
  /// (y1, y2)(phi^{-1}(t)).
  LimitCurve composed_curve() const;
  LimitCurve final_decay_curve() const;

 private:
  int p_, q_;
  double k3_, k4_, delta_;
};

/// Horizontal-axis limits for 0 <-> S1+S2 (k0, k1), pS1+S2 <-> pS1+2S2 (k2, k3).
class CapHorizontalCurves {
 public:
  CapHorizontalCurves(double k0, double k1, double k2, double k3, double alpha1);

  /// alpha1 exp(-k1 k2 / k3 t)
  double y_inf(double t) const;
  double a(double t) const;
  /// Closed-form inverse of a on [0, t_inf).
  double a_inverse(double t) const;
  /// Inverse of a by bisection, for cross-checking the closed form.
  double a_inverse_numeric(double t) const;
  /// alpha1 / (k0 (e^{k2/k3} - 1))
  double t_inf() const;
  /// alpha1 (1 - t / t_inf) on [0, t_inf).
  double linear(double t) const;

  LimitCurve linear_curve() const;
  LimitCurve y_inf_curve() const;

 private:
  double k0_, k1_, k2_, k3_, alpha_;
};

/// Rates of the vertical-axis limit process of the same network.
/// r1 = k0/(p-1)! (k0/k1)^{p-1}, delta1 = k3 (p-1)! / k1.
struct LimitJumpProcess {
  double r1 = 1.0;
  double delta1 = 1.0;
  int p = 2;
  double alpha = 1.0;

  static LimitJumpProcess from_rates(double k0, double k1, double k3, int p, double alpha = 1.0);
};

struct LimitJump {
  double t = 0.0;
  double v = 0.0;
};

/// (t_0, V_0) = (0, alpha), V_k = V_{k-1} exp(-delta1 E_k),
/// t_k = t_{k-1} + V_{k-1}^{p-1} phi_k / r1, with E, phi unit exponentials.
std::vector<LimitJump> sample_limit_jump_process(const LimitJumpProcess& proc, std::uint64_t seed,
                                                 std::size_t n_jumps, std::uint64_t stream = 0);

}  // namespace crnlab
