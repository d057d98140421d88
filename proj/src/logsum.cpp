#include "slowdrift/logsum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "slowdrift/simd/kernels.hpp"

namespace slowdrift {
namespace {

inline void neumaier_add(double& sum, double& comp, double t) {
  const double s = sum + t;
  if (std::abs(sum) >= std::abs(t)) {
    comp += (sum - s) + t;
  } else {
    comp += (t - s) + sum;
  }
  sum = s;
}

}  // namespace

void LogAccumulator::add(double x) {
  if (std::isnan(x)) {
    throw std::invalid_argument("log accumulator: NaN term");
  }
  if (x == kNegInf) {
    return;
  }
  if (x == std::numeric_limits<double>::infinity()) {
    max_ = x;
    return;
  }
  if (x <= max_) {
    neumaier_add(sum_, comp_, std::exp(x - max_));
    return;
  }
  const double scale = max_ == kNegInf ? 0.0 : std::exp(max_ - x);
  sum_ *= scale;
  comp_ *= scale;
  neumaier_add(sum_, comp_, 1.0);
  max_ = x;
}

double LogAccumulator::value() const {
  if (max_ == kNegInf || std::isinf(max_)) {
    return max_;
  }
  return max_ + std::log(sum_ + comp_);
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) {
    return kNegInf;
  }
  const double m = simd::minmax(x).max;
  if (std::isinf(m) || std::isnan(m)) {
    return m;
  }
  constexpr std::size_t kChunk = 512;
  std::array<double, kChunk> buf;
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t start = 0; start < x.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, x.size() - start);
    simd::exp_shifted(x.subspan(start, n), m, std::span<double>(buf.data(), n));
    for (std::size_t i = 0; i < n; ++i) {
      neumaier_add(sum, comp, buf[i]);
    }
  }
  return m + std::log(sum + comp);
}

std::vector<double> prefix_log_sum_exp(std::span<const double> x) {
  std::vector<double> out(x.size() + 1, kNegInf);
  LogAccumulator acc;
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc.add(x[k]);
    out[k + 1] = acc.value();
  }
  return out;
}

std::vector<double> suffix_log_sum_exp(std::span<const double> x) {
  std::vector<double> out(x.size() + 1, kNegInf);
  LogAccumulator acc;
  for (std::size_t k = x.size(); k-- > 0;) {
    acc.add(x[k]);
    out[k] = acc.value();
  }
  return out;
}

double log_add_exp(double a, double b) {
  if (a < b) {
    std::swap(a, b);
  }
  if (b == kNegInf) {
    return a;
  }
  return a + std::log1p(std::exp(b - a));
}

double log_sub_exp(double a, double b) {
  if (b > a) {
    throw std::domain_error("log_sub_exp: b > a");
  }
  if (b == kNegInf) {
    return a;
  }
  if (a == b) {
    return kNegInf;
  }
  const double d = b - a;
  // log(1 - e^d), accurate on both sides of d = -ln 2
  return a + (d > -0.6931471805599453 ? std::log(-std::expm1(d)) : std::log1p(-std::exp(d)));
}

}  // namespace slowdrift
