#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace crnlab {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// Sample mean and standard error from the unbiased sample variance.
MeanStderr mean_stderr(const std::vector<double>& values);

/// Coefficient of variation (sample sd / mean).
double coefficient_of_variation(const std::vector<double>& values);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF. The p-value
/// uses the asymptotic Kolmogorov law with Stephens' small-sample correction.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// p-value of statistic d at sample size n.
double ks_p_value(double d, std::size_t n);

/// Statistic above which the test rejects at level alpha.
double ks_critical_value(std::size_t n, double alpha);

struct TvResult {
  double distance = 0.0;
  std::size_t support = 0;  // bins compared: 0 .. support-1
  double reference_leak = 0.0;
  double empirical_leak = 0.0;
};

/// Total variation between an empirical distribution (need not be normalized)
/// and a reference pmf on {0, 1, ...}, computed on the shortest prefix holding
/// at least `coverage` of the reference mass.
TvResult total_variation(const std::vector<double>& empirical, const std::function<double(std::size_t)>& reference,
                         double coverage = 0.999);

}  // namespace crnlab
