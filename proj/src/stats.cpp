#include "crnlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crnlab {

MeanStderr mean_stderr(const std::vector<double>& v) {
  MeanStderr m;
  m.n = v.size();
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

double coefficient_of_variation(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("coefficient of variation needs two values");
  const auto m = mean_stderr(v);
  const double sd = m.stderr_ * std::sqrt(static_cast<double>(v.size()));
  return sd / m.mean;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
}

double ks_critical_value(std::size_t n, double alpha) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ks_p_value(mid, n) > alpha ? lo : hi) = mid;
  }
  return hi;
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("KS test needs a non-empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, sample.size()), sample.size()};
}

TvResult total_variation(const std::vector<double>& empirical, const std::function<double(std::size_t)>& reference,
                         double coverage) {
  double emp_total = 0.0;
  for (double e : empirical) emp_total += e;
  if (!(emp_total > 0.0)) throw std::invalid_argument("empirical distribution has no mass");

  TvResult out;
  double ref_mass = 0.0;
  std::size_t k = 0;
  while (ref_mass < coverage) {
    ref_mass += reference(k);
    ++k;
    if (k > 10'000'000) throw std::runtime_error("reference pmf does not reach the coverage level");
  }
  out.support = k;
  out.reference_leak = std::max(0.0, 1.0 - ref_mass);
  double emp_inside = 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double e = j < empirical.size() ? empirical[j] / emp_total : 0.0;
    emp_inside += e;
    acc += std::abs(e - reference(j));
  }
  out.empirical_leak = std::max(0.0, 1.0 - emp_inside);
  out.distance = 0.5 * acc;
  return out;
}

}  // namespace crnlab
