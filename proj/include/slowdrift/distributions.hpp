#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace slowdrift {

/// Sorted sample set with its empirical CDF.
class EmpiricalDistribution {
 public:
  /// Throws std::invalid_argument on an empty or NaN-containing sample.
  explicit EmpiricalDistribution(std::vector<double> samples);

  std::size_t n() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }

  /// Fraction of samples <= x.
  double ecdf(double x) const;
  double quantile(double p) const;

 private:
  std::vector<double> samples_;
};

/// Law of the largest positive jump on [0, horizon]:
/// F(x) = exp(-(c_plus / alpha) horizon x^-alpha), x > 0.
struct FrechetLaw {
  double c_plus = 1.0;
  double alpha = 1.5;
  double horizon = 1.0;

  void validate() const;
  double cdf(double x) const;
};

struct ExponentialLaw {
  double rate = 1.0;

  void validate() const;
  double cdf(double x) const;
};

double frechet_cdf(const FrechetLaw& law, double x);
double exponential_cdf(const ExponentialLaw& law, double x);

struct RescaledSamples {
  /// log H r^(-1/alpha), compared against the unit-horizon Frechet law.
  EmpiricalDistribution frechet_scale;
  /// (log H r^(-1/alpha))^(-alpha), compared against Exp(c_plus / alpha).
  EmpiricalDistribution exponential_scale;
  /// Samples with log H <= 0, left out of both sets.
  std::size_t excluded = 0;
};

/// Throws if r <= 0 or if no sample has positive log H.
RescaledSamples theorem_rescale(std::span<const double> log_h, double r, double alpha);

/// sup_x |ECDF(x) - F(x)|, taken over both one-sided limits at every sample.
double ks_one_sample(const EmpiricalDistribution& emp, const std::function<double(double)>& cdf);

/// sup-norm distance of the two ECDFs.
double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// Effective sample size of a KS statistic: n, or n m / (n + m) for two samples.
double ks_effective_n(std::size_t n, std::size_t m = 0);

/// Standard deviation of the KS statistic under the null at effective size
/// n_eff (from the Kolmogorov limit law, sd = 0.2603 / sqrt(n_eff)).
double ks_null_sd(double n_eff);

/// Asymptotic 1% critical value 1.628 / sqrt(n_eff).
double ks_critical_1pct(double n_eff);

/// Binomial standard error sqrt(p (1 - p) / n).
double binomial_sd(double p, std::size_t n);

}  // namespace slowdrift
