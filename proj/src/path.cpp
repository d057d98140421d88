#include "slowdrift/path.hpp"

#include <stdexcept>

namespace slowdrift {

EventPoints event_points(const LevyPathGrid& path) {
  if (path.values.empty()) {
    throw std::invalid_argument("event_points: empty path");
  }
  EventPoints ev;
  const std::size_t cells = path.cells();
  ev.times.reserve(path.values.size() + 2 * path.jumps.size());
  ev.values.reserve(path.values.size() + 2 * path.jumps.size());
  ev.grid_index.reserve(path.values.size());
  ev.times.push_back(0.0);
  ev.values.push_back(path.values[0]);
  ev.grid_index.push_back(0);

  std::size_t next_jump = 0;
  for (std::size_t k = 0; k < cells; ++k) {
    const double t0 = path.time_at(k);
    const double t1 = k + 1 == cells ? path.horizon : path.time_at(k + 1);
    // Jumps in (t0, t1] belong to this cell.
    std::size_t first = next_jump;
    double jump_sum = 0.0;
    while (next_jump < path.jumps.size() && (path.jumps[next_jump].time <= t1 || k + 1 == cells)) {
      jump_sum += path.jumps[next_jump].size;
      ++next_jump;
    }
    if (first < next_jump) {
      const double continuous = path.values[k + 1] - path.values[k] - jump_sum;
      double accumulated = 0.0;
      for (std::size_t j = first; j < next_jump; ++j) {
        const JumpMark& jm = path.jumps[j];
        const double before =
            path.values[k] + continuous * ((jm.time - t0) / (t1 - t0)) + accumulated;
        ev.times.push_back(jm.time);
        ev.values.push_back(before);
        accumulated += jm.size;
        ev.times.push_back(jm.time);
        ev.values.push_back(before + jm.size);
      }
    }
    if (!(ev.times.back() == t1 && ev.values.back() == path.values[k + 1])) {
      ev.times.push_back(t1);
      ev.values.push_back(path.values[k + 1]);
    }
    ev.grid_index.push_back(ev.size() - 1);
  }
  return ev;
}

Segments segments(const EventPoints& events) {
  Segments seg;
  const std::size_t n = events.size();
  seg.starts.reserve(n);
  seg.widths.reserve(n);
  seg.values.reserve(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double width = events.times[i + 1] - events.times[i];
    if (width > 0.0) {
      seg.starts.push_back(events.times[i]);
      seg.widths.push_back(width);
      seg.values.push_back(events.values[i]);
    }
  }
  return seg;
}

}  // namespace slowdrift
