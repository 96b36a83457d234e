#include "crnlab/limits.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "crnlab/rng.hpp"
#include "crnlab/structural.hpp"

namespace crnlab {

LimitCurve::LimitCurve(Fn f, double t_end, bool closed_end, std::map<std::string, double> params)
    : f_(std::move(f)), t_end_(t_end), closed_(closed_end), params_(std::move(params)) {
  if (!(t_end > 0.0)) throw std::invalid_argument("limit curve needs t_end > 0");
}

bool LimitCurve::in_domain(double t) const { return t >= 0.0 && (t < t_end_ || (closed_ && t == t_end_)); }

std::vector<double> LimitCurve::operator()(double t) const {
  if (!in_domain(t)) {
    throw DomainError("curve evaluated at t = " + std::to_string(t) + " outside [0, " + std::to_string(t_end_) +
                      (closed_ ? "]" : ")"));
  }
  return f_(t);
}

std::string curve_csv(const LimitCurve& curve, const std::vector<double>& grid) {
  std::ostringstream os;
  bool header = false;
  char buf[64];
  for (double t : grid) {
    const auto v = curve(t);
    if (!header) {
      os << "t";
      for (std::size_t i = 0; i < v.size(); ++i) os << ",v_" << (i + 1);
      os << "\n";
      header = true;
    }
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, t);
    os.write(buf, p - buf);
    for (double x : v) {
      auto [q, ec2] = std::to_chars(buf, buf + sizeof buf, x);
      os << ',';
      os.write(buf, q - buf);
    }
    os << "\n";
  }
  return os.str();
}

namespace {

struct Nodes {
  double dt = 0.0;
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> f;
};

std::vector<double> axpy(const std::vector<double>& x, double a, const std::vector<double>& y) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
  return out;
}

bool bad(const std::vector<double>& x, double ceiling) {
  for (double v : x) {
    if (!std::isfinite(v) || std::abs(v) > ceiling) return true;
  }
  return false;
}

}  // namespace

LimitCurve integrate_field(const VectorField& field, std::vector<double> x0, double t_end, const OdeOptions& opts) {
  if (!(opts.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / opts.dt - 1e-9));
  auto nodes = std::make_shared<Nodes>();
  nodes->dt = t_end / static_cast<double>(steps);
  const double h = nodes->dt;
  nodes->x.push_back(x0);
  nodes->f.push_back(field(x0));
  bool truncated = false;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto& x = nodes->x.back();
    const auto& k1 = nodes->f.back();
    const auto k2 = field(axpy(x, h / 2, k1));
    const auto k3 = field(axpy(x, h / 2, k2));
    const auto k4 = field(axpy(x, h, k3));
    std::vector<double> next(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) next[i] = x[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (bad(next, opts.blow_up_ceiling)) {
      truncated = true;
      break;
    }
    auto fn = field(next);
    if (bad(fn, std::numeric_limits<double>::max())) {
      truncated = true;
      break;
    }
    nodes->x.push_back(std::move(next));
    nodes->f.push_back(std::move(fn));
  }
  const double end = h * static_cast<double>(nodes->x.size() - 1);
  auto eval = [nodes](double t) {
    const double h = nodes->dt;
    const std::size_t last = nodes->x.size() - 1;
    auto k = static_cast<std::size_t>(std::floor(t / h));
    if (k >= last) k = last == 0 ? 0 : last - 1;
    if (last == 0) return nodes->x[0];
    const double s = (t - static_cast<double>(k) * h) / h;
    const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
    const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
    const auto& x0 = nodes->x[k];
    const auto& x1 = nodes->x[k + 1];
    const auto& f0 = nodes->f[k];
    const auto& f1 = nodes->f[k + 1];
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = h00 * x0[i] + h10 * h * f0[i] + h01 * x1[i] + h11 * h * f1[i];
    }
    return out;
  };
  if (end <= 0.0) {
    LimitCurve c([x = nodes->x[0]](double) { return x; }, std::numeric_limits<double>::min(), false);
    c.mark_truncated();
    return c;
  }
  LimitCurve c(eval, end, !truncated, {{"dt", h}});
  if (truncated) c.mark_truncated();
  return c;
}

LimitCurve integrate_mass_action_ode(const ReactionNetwork& net, std::vector<double> x0, double t_end,
                                     const OdeOptions& opts) {
  if (x0.size() != net.n_species()) throw StructuralError("initial point dimension mismatch");
  auto field = [net](const std::vector<double>& x) { return mass_action_field(net, x); };
  return integrate_field(field, std::move(x0), t_end, opts);
}

ReactionNetwork dominant_subnetwork(const ReactionNetwork& net) {
  const Count top = net.max_source_size();
  std::vector<Reaction> kept;
  for (const auto& r : net.reactions()) {
    if (r.source().norm() == top) kept.push_back(r);
  }
  return ReactionNetwork(net.species_names(), std::move(kept));
}

LimitCurve integrate_dominant_ode(const ReactionNetwork& net, std::vector<double> x0, double t_end,
                                  const OdeOptions& opts) {
  return integrate_mass_action_ode(dominant_subnetwork(net), std::move(x0), t_end, opts);
}

LimitCurve triangle_regime_curve(TriangleRegime kind, const TriangleRates& k, const std::vector<double>& x0,
                                 double t_end, const OdeOptions& opts) {
  if (!(k.k1 > 0 && k.k2 > 0 && k.k12 > 0)) throw std::invalid_argument("triangle rates must be positive");
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case TriangleRegime::A: {
      if (x0.size() != 2) throw std::invalid_argument("regime a needs a 2-D start");
      const double a1 = x0[0], a2 = x0[1], k12 = k.k12;
      return LimitCurve([=](double t) { return std::vector<double>{a1, a2 * std::exp(-k12 * a1 * t)}; }, inf, false,
                        {{"alpha1", a1}, {"kappa12", k12}});
    }
    case TriangleRegime::B: {
      if (x0.size() != 2) throw std::invalid_argument("regime b needs a 2-D start");
      const double k2 = k.k2, k12 = k.k12;
      auto field = [=](const std::vector<double>& x) { return std::vector<double>{k2 * x[1], -k12 * x[0] * x[1]}; };
      return integrate_field(field, x0, t_end, opts);
    }
    case TriangleRegime::C: {
      const double c0 = x0.empty() ? 1.0 : x0[0], k1 = k.k1;
      return LimitCurve([=](double t) { return std::vector<double>{c0 * std::exp(-k1 * t)}; }, inf, false,
                        {{"kappa1", k1}});
    }
  }
  throw std::invalid_argument("unknown regime");
}

AgazziCurves::AgazziCurves(int p, int q, double kappa3, double kappa4, double delta)
    : p_(p), q_(q), k3_(kappa3), k4_(kappa4), delta_(delta) {
  if (p < 2 || q < 2) throw std::invalid_argument("Agazzi curves need p, q >= 2");
  if (!(kappa3 > 0 && kappa4 > 0)) throw std::invalid_argument("rates must be positive");
  if (!(delta > 0 && delta <= 1)) throw std::invalid_argument("delta must lie in (0, 1]");
}

double AgazziCurves::y1(double t) const {
  if (t < 0) throw DomainError("negative time");
  const double base = p_ * (p_ - 1) * std::pow(delta_, p_ - 1) * k3_ * t + 1.0;
  return delta_ / std::pow(base, 1.0 / (p_ - 1));
}

double AgazziCurves::y2(double t) const { return (1.0 - y1(t)) / p_; }

double AgazziCurves::phi(double t) const {
  if (t < 0) throw DomainError("negative time");
  if (delta_ >= 1.0) throw DomainError("phi diverges at 0 when delta = 1");
  if (t == 0) return 0.0;
  const double pq = std::pow(static_cast<double>(p_), q_);
  auto f = [this, pq](double s) { return pq / std::pow(1.0 - y1(s), q_); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 15, 1e-13);
}

double AgazziCurves::phi_inverse(double s) const {
  if (s < 0) throw DomainError("negative argument");
  double lo = 0.0, hi = 1.0;
  while (phi(hi) < s) hi *= 2;
  while (hi - lo > 1e-11) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double AgazziCurves::final_decay(double t) const {
  if (t < 0) throw DomainError("negative time");
  return 1.0 / std::pow(1.0 + k4_ * q_ * t, 1.0 / q_);
}

LimitCurve AgazziCurves::y_curve() const {
  return LimitCurve([c = *this](double t) { return std::vector<double>{c.y1(t), c.y2(t)}; },
                    std::numeric_limits<double>::infinity(), false,
                    {{"p", static_cast<double>(p_)}, {"kappa3", k3_}, {"delta", delta_}});
}

LimitCurve AgazziCurves::composed_curve() const {
  if (delta_ >= 1.0) throw DomainError("composed curve needs delta < 1");
  return LimitCurve(
      [c = *this](double t) {
        const double u = c.phi_inverse(t);
        return std::vector<double>{c.y1(u), c.y2(u)};
      },
      std::numeric_limits<double>::infinity());
}

LimitCurve AgazziCurves::final_decay_curve() const {
  return LimitCurve([c = *this](double t) { return std::vector<double>{c.final_decay(t)}; },
                    std::numeric_limits<double>::infinity());
}

CapHorizontalCurves::CapHorizontalCurves(double k0, double k1, double k2, double k3, double alpha1)
    : k0_(k0), k1_(k1), k2_(k2), k3_(k3), alpha_(alpha1) {
  if (!(k0 > 0 && k1 > 0 && k2 > 0 && k3 > 0 && alpha1 > 0)) {
    throw std::invalid_argument("rates and alpha1 must be positive");
  }
}

double CapHorizontalCurves::y_inf(double t) const {
  if (t < 0) throw DomainError("negative time");
  return alpha_ * std::exp(-k1_ * k2_ / k3_ * t);
}

double CapHorizontalCurves::a(double t) const {
  if (t < 0) throw DomainError("negative time");
  return alpha_ / (k0_ * std::expm1(k2_ / k3_)) * -std::expm1(-k1_ * k2_ / k3_ * t);
}

double CapHorizontalCurves::t_inf() const { return alpha_ / (k0_ * std::expm1(k2_ / k3_)); }

double CapHorizontalCurves::a_inverse(double t) const {
  if (t < 0 || t >= t_inf()) throw DomainError("a^{-1} defined on [0, t_inf) only");
  return -k3_ / (k1_ * k2_) * std::log((alpha_ - k0_ * std::expm1(k2_ / k3_) * t) / alpha_);
}

double CapHorizontalCurves::a_inverse_numeric(double t) const {
  if (t < 0 || t >= t_inf()) throw DomainError("a^{-1} defined on [0, t_inf) only");
  double lo = 0.0, hi = 1.0;
  while (a(hi) < t) hi *= 2;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (a(mid) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double CapHorizontalCurves::linear(double t) const {
  if (t < 0 || t >= t_inf()) throw DomainError("linear curve defined on [0, t_inf) only");
  return alpha_ * (1.0 - t / t_inf());
}

LimitCurve CapHorizontalCurves::linear_curve() const {
  return LimitCurve([c = *this](double t) { return std::vector<double>{c.linear(t)}; }, t_inf(), false,
                    {{"t_inf", t_inf()}, {"alpha1", alpha_}});
}

LimitCurve CapHorizontalCurves::y_inf_curve() const {
  return LimitCurve([c = *this](double t) { return std::vector<double>{c.y_inf(t)}; },
                    std::numeric_limits<double>::infinity());
}

LimitJumpProcess LimitJumpProcess::from_rates(double k0, double k1, double k3, int p, double alpha) {
  if (p < 2) throw std::invalid_argument("p must be >= 2");
  double fact = 1.0;
  for (int i = 2; i <= p - 1; ++i) fact *= i;
  LimitJumpProcess out;
  out.r1 = k0 / fact * std::pow(k0 / k1, p - 1);
  out.delta1 = k3 * fact / k1;
  out.p = p;
  out.alpha = alpha;
  return out;
}

std::vector<LimitJump> sample_limit_jump_process(const LimitJumpProcess& proc, std::uint64_t seed,
                                                 std::size_t n_jumps, std::uint64_t stream) {
  if (n_jumps == 0) throw std::invalid_argument("n_jumps must be >= 1");
  if (!(proc.alpha > 0 && proc.alpha <= 1)) throw std::invalid_argument("alpha must lie in (0, 1]");
  Rng rng(seed, stream);
  std::vector<LimitJump> out;
  out.reserve(n_jumps + 1);
  out.push_back({0.0, proc.alpha});
  for (std::size_t k = 1; k <= n_jumps; ++k) {
    const double e = rng.exponential(1.0);
    const double phi = rng.exponential(1.0);
    const auto& prev = out.back();
    out.push_back({prev.t + std::pow(prev.v, proc.p - 1) * phi / proc.r1, prev.v * std::exp(-proc.delta1 * e)});
  }
  return out;
}

}  // namespace crnlab
