#pragma once

#include <limits>
#include <span>
#include <vector>

namespace slowdrift {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Running log(sum exp(x_i)) with a compensated (Neumaier) sum kept relative
/// to the largest term seen so far.
class LogAccumulator {
 public:
  void add(double x);
  double value() const;
  bool empty() const { return max_ == kNegInf; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(sum exp(x)), -inf for an empty span.
double log_sum_exp(std::span<const double> x);

/// out[k] = log sum_{j < k} exp(x_j), size x.size() + 1, out[0] = -inf.
std::vector<double> prefix_log_sum_exp(std::span<const double> x);

/// out[k] = log sum_{j >= k} exp(x_j), size x.size() + 1, out.back() = -inf.
std::vector<double> suffix_log_sum_exp(std::span<const double> x);

/// log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

/// log(exp(a) - exp(b)) for a >= b; -inf when equal.
double log_sub_exp(double a, double b);

}  // namespace slowdrift
