#include "slowdrift/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slowdrift/simd/kernels.hpp"

namespace slowdrift {
namespace {

void require_values(const LevyPathGrid& path) {
  if (path.values.empty()) {
    throw std::invalid_argument("path has no values");
  }
}

double max_jump(const LevyPathGrid& path) {
  double best = 0.0;
  for (const JumpMark& j : path.jumps) {
    best = std::max(best, j.size);
  }
  return best;
}

}  // namespace

double largest_positive_jump(const LevyPathGrid& path) {
  if (!path.resolved()) {
    throw std::invalid_argument("largest_positive_jump: path jumps are not resolved");
  }
  return max_jump(path);
}

double ascending_barrier(const EventPoints& events) {
  double lowest = events.values.at(0);
  double best = 0.0;
  for (double v : events.values) {
    lowest = std::min(lowest, v);
    best = std::max(best, v - lowest);
  }
  return best;
}

double ascending_barrier(const LevyPathGrid& path) {
  require_values(path);
  if (path.jumps.empty()) {
    double lowest = path.values[0];
    double best = 0.0;
    for (double v : path.values) {
      lowest = std::min(lowest, v);
      best = std::max(best, v - lowest);
    }
    return best;
  }
  // A jump is an ascent over zero width; taking it explicitly keeps
  // Z# >= Z-natural exact under rounding of the post-jump values.
  return std::max(ascending_barrier(event_points(path)), max_jump(path));
}

double drifted_barrier(const LevyPathGrid& path, double lambda) {
  require_values(path);
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("drifted_barrier: lambda must be non-negative");
  }
  if (lambda == 0.0) {
    return ascending_barrier(path);
  }
  // Lindley recursion on the increments: d_k = f_k - min_{j<=k} f_j with
  // f = Z - lambda t. Working with increments avoids the cancellation of
  // large lambda t terms and keeps the result monotone in lambda under
  // rounding.
  const EventPoints ev = event_points(path);
  double ascent = 0.0;
  double best = 0.0;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    const double step = (ev.values[i] - ev.values[i - 1]) - lambda * (ev.times[i] - ev.times[i - 1]);
    ascent = std::max(0.0, ascent + step);
    best = std::max(best, ascent);
  }
  return std::max(best, max_jump(path));
}

RunningExtrema running_extrema(const LevyPathGrid& path) {
  require_values(path);
  // Jump endpoints lie between grid values unless a jump carries the path
  // beyond them, so scan both.
  simd::MinMax mm = simd::minmax(path.values);
  if (!path.jumps.empty()) {
    const EventPoints ev = event_points(path);
    const simd::MinMax e = simd::minmax(ev.values);
    mm.min = std::min(mm.min, e.min);
    mm.max = std::max(mm.max, e.max);
  }
  return {mm.max, mm.min, std::max(std::abs(mm.max), std::abs(mm.min))};
}

bool FunctionalReport::consistent() const {
  // Post-jump values are rounded sums, so the range bound gets a few ulps.
  const double range = running_max - running_min;
  return largest_jump >= 0.0 && ascending_barrier >= largest_jump &&
         ascending_barrier <= range + 8.0 * std::numeric_limits<double>::epsilon() * bilateral_sup &&
         bilateral_sup == std::max(std::abs(running_max), std::abs(running_min));
}

FunctionalReport functional_report(const LevyPathGrid& path) {
  FunctionalReport rep;
  rep.jumps_resolved = path.resolved();
  rep.largest_jump = rep.jumps_resolved ? largest_positive_jump(path) : 0.0;
  rep.ascending_barrier = ascending_barrier(path);
  const RunningExtrema ex = running_extrema(path);
  rep.running_max = ex.running_max;
  rep.running_min = ex.running_min;
  rep.bilateral_sup = ex.bilateral_sup;
  return rep;
}

}  // namespace slowdrift
