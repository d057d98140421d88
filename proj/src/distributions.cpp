#include "slowdrift/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slowdrift {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty()) {
    throw std::invalid_argument("empirical distribution needs at least one sample");
  }
  for (double x : samples_) {
    if (std::isnan(x)) {
      throw std::invalid_argument("empirical distribution: NaN sample");
    }
  }
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::ecdf(double x) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double EmpiricalDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("quantile level must lie in [0, 1]");
  }
  const double pos = p * static_cast<double>(samples_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples_.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples_[lo] + frac * (samples_[hi] - samples_[lo]);
}

void FrechetLaw::validate() const {
  if (!(c_plus > 0.0) || !(alpha > 1.0 && alpha < 2.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("Frechet law needs c_plus > 0, 1 < alpha < 2, horizon > 0");
  }
}

double FrechetLaw::cdf(double x) const {
  if (!(x > 0.0)) {
    return 0.0;
  }
  return std::exp(-(c_plus / alpha) * horizon * std::pow(x, -alpha));
}

void ExponentialLaw::validate() const {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("exponential law needs rate > 0");
  }
}

double ExponentialLaw::cdf(double x) const {
  if (!(x > 0.0)) {
    return 0.0;
  }
  return -std::expm1(-rate * x);
}

double frechet_cdf(const FrechetLaw& law, double x) {
  law.validate();
  return law.cdf(x);
}

double exponential_cdf(const ExponentialLaw& law, double x) {
  law.validate();
  return law.cdf(x);
}

RescaledSamples theorem_rescale(std::span<const double> log_h, double r, double alpha) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("theorem_rescale: r must be positive");
  }
  const double factor = std::pow(r, -1.0 / alpha);
  std::vector<double> frechet;
  std::vector<double> expo;
  frechet.reserve(log_h.size());
  expo.reserve(log_h.size());
  std::size_t excluded = 0;
  for (double v : log_h) {
    if (!(v > 0.0)) {
      ++excluded;
      continue;
    }
    const double y = v * factor;
    frechet.push_back(y);
    expo.push_back(std::pow(y, -alpha));
  }
  if (frechet.empty()) {
    throw std::invalid_argument("theorem_rescale: no sample with positive log H");
  }
  return {EmpiricalDistribution(std::move(frechet)), EmpiricalDistribution(std::move(expo)),
          excluded};
}

double ks_one_sample(const EmpiricalDistribution& emp, const std::function<double(double)>& cdf) {
  const auto& xs = emp.samples();
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto& xa = a.samples();
  const auto& xb = b.samples();
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == x) {
      ++i;
    }
    while (j < xb.size() && xb[j] == x) {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_effective_n(std::size_t n, std::size_t m) {
  if (m == 0) {
    return static_cast<double>(n);
  }
  const double a = static_cast<double>(n);
  const double b = static_cast<double>(m);
  return a * b / (a + b);
}

double ks_null_sd(double n_eff) { return 0.2603 / std::sqrt(n_eff); }

double ks_critical_1pct(double n_eff) { return 1.628 / std::sqrt(n_eff); }

double binomial_sd(double p, std::size_t n) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

}  // namespace slowdrift
