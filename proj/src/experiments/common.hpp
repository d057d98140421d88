#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "slowdrift/distributions.hpp"
#include "slowdrift/experiments.hpp"
#include "slowdrift/parallel.hpp"
#include "slowdrift/rng.hpp"

namespace slowdrift::detail {

inline CriterionPart below(std::string name, double value, double threshold, std::string note = {}) {
  return {std::move(name), value, "<", threshold, value < threshold, false, std::move(note)};
}

inline CriterionPart at_most(std::string name, double value, double threshold, std::string note = {}) {
  return {std::move(name), value, "<=", threshold, value <= threshold, false, std::move(note)};
}

/// KS threshold for effective size n_eff; padded by three null standard
/// deviations in statistical mode.
inline double ks_threshold(const ExperimentConfig& c, double base, double n_eff) {
  return c.statistical ? base + 3.0 * ks_null_sd(n_eff) : base;
}

/// Runs `n` replicas of one (branch, r index) block, each with its own stream.
template <class T, class F>
std::vector<T> run_block(Report& report, const ExperimentConfig& c, unsigned branch,
                         unsigned r_index, std::size_t n, F&& f) {
  report.streams.push_back({report.experiment, branch, r_index, n});
  const Experiment e = report.experiment;
  return parallel_map<T>(n, c.workers, [&](std::size_t i) {
    RngStream rng(c.seed, stream_id(e, branch, r_index, i));
    return f(rng, i);
  });
}

inline double ks_vs(const std::vector<double>& x, const std::function<double(double)>& cdf) {
  return ks_one_sample(EmpiricalDistribution(x), cdf);
}

inline double ks2(const std::vector<double>& a, const std::vector<double>& b) {
  return ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b));
}

inline Json ks_entry(double d, double n_eff) {
  return Json{{"ks", d}, {"null_sd", ks_null_sd(n_eff)}, {"critical_1pct", ks_critical_1pct(n_eff)},
              {"n_eff", n_eff}};
}

struct MeanSe {
  double mean;
  double se;
};

inline MeanSe mean_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

inline std::string r_label(double r) { return fmt::format("{}", r); }

}  // namespace slowdrift::detail
