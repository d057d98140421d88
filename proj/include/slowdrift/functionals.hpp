#pragma once

#include "slowdrift/path.hpp"

namespace slowdrift {

/// Largest positive jump; 0 when the path has none. Throws for grid-only
/// paths (cutoff 0), whose increments are not jumps.
double largest_positive_jump(const LevyPathGrid& path);

/// sup_{x <= y} (Z_y - Z_x), evaluated in one pass over the event points.
double ascending_barrier(const LevyPathGrid& path);
double ascending_barrier(const EventPoints& events);

/// Ascending barrier of t -> Z_t - lambda t. Meant for unit-horizon paths.
double drifted_barrier(const LevyPathGrid& path, double lambda);

struct RunningExtrema {
  double running_max;
  double running_min;
  double bilateral_sup;
};

RunningExtrema running_extrema(const LevyPathGrid& path);

struct FunctionalReport {
  double largest_jump = 0.0;  // 0 for grid-only paths
  double ascending_barrier = 0.0;
  double running_max = 0.0;
  double running_min = 0.0;
  double bilateral_sup = 0.0;
  bool jumps_resolved = false;

  /// Z# >= Z-natural >= 0, Z# <= max - min, bilateral sup = max(|max|, |min|).
  bool consistent() const;
};

FunctionalReport functional_report(const LevyPathGrid& path);

}  // namespace slowdrift
