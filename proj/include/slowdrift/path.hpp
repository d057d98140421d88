#pragma once

#include <cstddef>
#include <vector>

namespace slowdrift {

struct JumpMark {
  double time;
  double size;
};

/// Cadlag path skeleton on the grid k * step, k = 0..cells(). values[k] is the
/// right value at time k * step. Jumps with |size| > cutoff are listed
/// explicitly; between them the continuous part is linear inside each cell.
/// cutoff == 0 marks a grid-only path whose jumps are not resolved.
struct LevyPathGrid {
  double horizon = 0.0;
  double step = 0.0;
  std::vector<double> values;
  std::vector<JumpMark> jumps;
  double cutoff = 0.0;

  bool resolved() const { return cutoff > 0.0; }
  std::size_t cells() const { return values.empty() ? 0 : values.size() - 1; }
  double time_at(std::size_t k) const { return static_cast<double>(k) * step; }
};

/// Times and values at which path suprema are attained: the grid points plus
/// the pre-jump (t-) and post-jump (t) values of every listed jump.
struct EventPoints {
  std::vector<double> times;
  std::vector<double> values;
  /// grid_index[k]: index of the point carrying the right value at grid time k.
  std::vector<std::size_t> grid_index;

  std::size_t size() const { return times.size(); }
};

EventPoints event_points(const LevyPathGrid& path);

/// Piecewise-constant (left value, cadlag) view of a path used by all
/// quadratures: on [starts[i], starts[i] + widths[i]) the path equals values[i].
struct Segments {
  std::vector<double> starts;
  std::vector<double> widths;
  std::vector<double> values;

  std::size_t size() const { return starts.size(); }
  double end() const { return starts.empty() ? 0.0 : starts.back() + widths.back(); }
};

Segments segments(const EventPoints& events);

}  // namespace slowdrift
