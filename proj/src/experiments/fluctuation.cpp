#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "common.hpp"
#include "slowdrift/functionals.hpp"
#include "slowdrift/potential.hpp"

namespace slowdrift {
namespace {

constexpr double kXs[] = {0.25, 0.5, 1.0, 2.0, 4.0};
constexpr double kAs[] = {0.5, 1.0, 2.0, 4.0, 8.0};
constexpr std::size_t kNx = std::size(kXs);

struct Draw {
  double barrier[kNx];
  double jump[kNx];
  double bilateral[kNx];
  bool consistent = true;
  bool ordered = true;  // barrier >= largest jump at every x
};

/// The path restricted to [0, k step].
LevyPathGrid prefix(const LevyPathGrid& path, std::size_t k) {
  LevyPathGrid out;
  out.horizon = path.time_at(k);
  out.step = path.step;
  out.cutoff = path.cutoff;
  out.values.assign(path.values.begin(), path.values.begin() + static_cast<std::ptrdiff_t>(k + 1));
  for (const JumpMark& j : path.jumps) {
    if (j.time <= out.horizon) out.jumps.push_back(j);
  }
  return out;
}

}  // namespace

Report run_verify_fluctuation(const ExperimentConfig& c) {
  c.validate();
  c.params.validate(true);
  Report report;
  report.experiment = Experiment::fluctuation;
  const StablePotentialParams& p = c.params;
  const std::size_t n = c.replicas(Experiment::fluctuation);
  const double horizon = kXs[kNx - 1];
  const double step = kXs[0] / std::ceil(kXs[0] / std::min(c.step, kXs[0] / 25.0));
  // Jumps above a / 2 are resolved for every a on the grid, so V-natural is
  // exact at each level.
  const double cutoff = std::min(default_cutoff(p, horizon), kAs[0] / 2.0);

  const auto draws = detail::run_block<Draw>(report, c, 1, 0, n, [&](RngStream& rng, std::size_t) {
    const auto path = potential_path(sample_path_jump_resolved(p, horizon, step, cutoff, rng), p.delta);
    Draw d;
    for (std::size_t i = 0; i < kNx; ++i) {
      const auto rep = functional_report(prefix(path, static_cast<std::size_t>(std::llround(kXs[i] / step))));
      d.barrier[i] = rep.ascending_barrier;
      d.jump[i] = rep.largest_jump;
      d.bilateral[i] = rep.bilateral_sup;
      d.consistent = d.consistent && rep.consistent();
      d.ordered = d.ordered && rep.ascending_barrier >= rep.largest_jump;
    }
    return d;
  });
  std::size_t unordered = 0;
  for (const Draw& d : draws) {
    report.invariants.add(d.consistent);
    unordered += !d.ordered;
  }

  const double c1 = p.c_plus / p.alpha;
  const double k_sigma = c.tolerance("A8.sigma");
  Criterion a8{"A8", "P{V#_x <= a} <= exp(-(c+/alpha) x / a^alpha) on a 5 x 5 grid of (x, a)", {}};
  Json cells = Json::array();
  double envelope = 0.0;
  bool tail_decreasing = true;
  Json tails = Json::array();
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < kNx; ++i) {
    const double x = kXs[i];
    double prev_tail = 1.0;
    Json tail_row = Json::array();
    for (double a : kAs) {
      double below_barrier = 0.0, below_jump = 0.0, above_sup = 0.0;
      for (const Draw& d : draws) {
        below_barrier += d.barrier[i] <= a;
        below_jump += d.jump[i] <= a;
        above_sup += d.bilateral[i] > a;
      }
      below_barrier /= nn;
      below_jump /= nn;
      above_sup /= nn;
      const double bound = std::exp(-c1 * x / std::pow(a, p.alpha));
      const double sd = binomial_sd(bound, n);
      a8.parts.push_back(detail::at_most(fmt::format("x{}_a{}", x, a), below_barrier,
                                         bound + k_sigma * sd,
                                         fmt::format("bound {}, binomial sd {}", bound, sd)));
      const double c2 = above_sup * std::pow(a, p.alpha) / x;
      envelope = std::max(envelope, c2);
      tail_decreasing = tail_decreasing && above_sup <= prev_tail;
      prev_tail = above_sup;
      tail_row.push_back(above_sup);
      cells.push_back({{"x", x},
                       {"a", a},
                       {"p_barrier_below", below_barrier},
                       {"bound", bound},
                       {"binomial_sd", sd},
                       {"gap_sd", (bound - below_barrier) / (sd > 0.0 ? sd : 1.0)},
                       {"p_largest_jump_below", below_jump},
                       {"largest_jump_z", sd > 0.0 ? (below_jump - bound) / sd : 0.0},
                       {"p_bilateral_sup_above", above_sup},
                       {"c2_ratio", c2}});
    }
    tails.push_back({{"x", x}, {"p_bilateral_sup_above", tail_row}});
  }
  report.criteria.push_back(a8);

  report.diagnostics["step"] = step;
  report.diagnostics["cutoff"] = cutoff;
  report.diagnostics["cells"] = cells;
  report.diagnostics["c2_envelope"] = envelope;
  report.diagnostics["bilateral_tail"] = {{"a", kAs}, {"by_x", tails}, {"non_increasing_in_a", tail_decreasing}};
  report.diagnostics["barrier_below_largest_jump_paths"] = unordered;

  SampleSet barrier{"barrier_x4", {}, {}, {}};
  SampleSet bilateral{"bilateral_sup_x4", {}, {}, {}};
  std::vector<double> b4;
  for (std::size_t k = 0; k < n; ++k) {
    barrier.add(horizon, k, draws[k].barrier[kNx - 1]);
    bilateral.add(horizon, k, draws[k].bilateral[kNx - 1]);
    b4.push_back(draws[k].barrier[kNx - 1]);
  }
  report.samples.push_back(std::move(barrier));
  report.samples.push_back(std::move(bilateral));
  // The barrier ECDF against the exact law of the largest jump, which bounds it.
  const FrechetLaw law{p.c_plus, p.alpha, horizon};
  report.ecdfs.push_back({"barrier_x4", b4, [law](double v) { return law.cdf(v); }});
  return report;
}

}  // namespace slowdrift
