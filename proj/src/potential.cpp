#include "slowdrift/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slowdrift/logsum.hpp"

namespace slowdrift {
namespace {

LevyPathGrid add_drift(const LevyPathGrid& path, double slope) {
  LevyPathGrid out = path;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] += slope * out.time_at(k);
  }
  if (!out.values.empty()) {
    out.values.back() = path.values.back() + slope * path.horizon;
  }
  return out;
}

}  // namespace

LevyPathGrid potential_path(const LevyPathGrid& stable_path, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("potential_path: delta must be positive");
  }
  return add_drift(stable_path, -delta);
}

LevyPathGrid negative_potential_path(const LevyPathGrid& mirrored_path, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("negative_potential_path: delta must be positive");
  }
  return add_drift(mirrored_path, delta);
}

ScaleFunction scale_function(const Segments& seg) {
  if (seg.size() == 0) {
    throw std::invalid_argument("scale_function: empty potential");
  }
  ScaleFunction sf;
  const std::size_t n = seg.size();
  sf.positions.resize(n + 1);
  sf.log_increments.resize(n);
  const double log_max = std::log(std::numeric_limits<double>::max());
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(seg.values[i])) {
      throw std::invalid_argument("scale_function: non-finite potential value");
    }
    sf.positions[i] = seg.starts[i];
    sf.log_increments[i] = seg.values[i] + std::log(seg.widths[i]);
    if (sf.log_increments[i] > log_max) {
      sf.overflow_cells.push_back(i);
    }
  }
  sf.positions[n] = seg.end();
  sf.log_a = prefix_log_sum_exp(sf.log_increments);
  sf.a_values.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    sf.a_values[k] = std::exp(sf.log_a[k]);
  }
  return sf;
}

ScaleFunction scale_function(const LevyPathGrid& potential) {
  return scale_function(segments(event_points(potential)));
}

double scale_inverse_log(const ScaleFunction& sf, double log_a) {
  if (std::isnan(log_a)) {
    throw std::invalid_argument("scale_inverse: NaN level");
  }
  if (log_a == kNegInf) {
    return 0.0;
  }
  if (log_a > sf.log_total()) {
    throw ScaleRangeError("scale_inverse: level exceeds A at the end of the range (" +
                              std::to_string(sf.end()) + ")",
                          true);
  }
  // First k with log_a[k] >= level; the level lies in segment k - 1.
  const auto it = std::lower_bound(sf.log_a.begin(), sf.log_a.end(), log_a);
  const auto k = static_cast<std::size_t>(it - sf.log_a.begin());
  if (k == 0) {
    return 0.0;
  }
  const std::size_t seg = k - 1;
  const double li = sf.log_increments[seg];
  double frac = std::exp(log_a - li) - std::exp(sf.log_a[seg] - li);
  frac = std::clamp(frac, 0.0, 1.0);
  return sf.positions[seg] + frac * (sf.positions[k] - sf.positions[seg]);
}

double scale_inverse(const ScaleFunction& sf, double a) {
  if (std::isnan(a)) {
    throw std::invalid_argument("scale_inverse: NaN level");
  }
  if (a < 0.0) {
    throw ScaleRangeError("scale_inverse: negative level", false);
  }
  return scale_inverse_log(sf, a == 0.0 ? kNegInf : std::log(a));
}

double negative_truncation_depth(const StablePotentialParams& params, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) {
    throw std::invalid_argument("negative_truncation_depth: tol must lie in (0, 1)");
  }
  if (!(params.delta > 0.0)) {
    throw std::invalid_argument("negative_truncation_depth: delta must be positive");
  }
  const double d = params.delta / 2.0;
  return std::max(10.0, std::log(1.0 / (tol * d)) / d);
}

}  // namespace slowdrift
