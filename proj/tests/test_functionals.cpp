#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "slowdrift/functionals.hpp"
#include "slowdrift/stable.hpp"

using namespace slowdrift;

namespace {

LevyPathGrid make_path(std::vector<double> values, std::vector<JumpMark> jumps = {},
                       double cutoff = 0.0) {
  LevyPathGrid p;
  p.step = 1.0;
  p.horizon = static_cast<double>(values.size() - 1);
  p.values = std::move(values);
  p.jumps = std::move(jumps);
  p.cutoff = cutoff;
  return p;
}

// Double supremum over all ordered pairs of event points; a listed jump is an
// ascent of its own size over zero width.
double brute_barrier(const LevyPathGrid& path) {
  const auto ev = event_points(path);
  double best = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    for (std::size_t j = i; j < ev.size(); ++j) {
      best = std::max(best, ev.values[j] - ev.values[i]);
    }
  }
  for (const auto& j : path.jumps) best = std::max(best, j.size);
  return best;
}

double brute_events(const EventPoints& ev) {
  double best = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    for (std::size_t j = i; j < ev.size(); ++j) {
      best = std::max(best, ev.values[j] - ev.values[i]);
    }
  }
  return best;
}

const StablePotentialParams kDefault{1.5, 1.0, 1.0, 1.0};

}  // namespace

TEST_CASE("largest positive jump") {
  const auto p = make_path({0.0, 2.0, 1.0}, {{0.3, 2.0}, {0.7 + 1.0, -1.0}}, 0.5);
  CHECK(largest_positive_jump(p) == 2.0);
  CHECK(largest_positive_jump(make_path({0.0, 0.1, 0.2}, {}, 0.5)) == 0.0);
  CHECK_THROWS(largest_positive_jump(make_path({0.0, 1.0})));
}

TEST_CASE("ascending barrier hand cases") {
  CHECK(ascending_barrier(make_path({0.0, 2.0, 1.0, 3.0})) == 3.0);
  CHECK(ascending_barrier(make_path({0.0, -1.0, -2.5, -4.0})) == 0.0);
  // Flat path with one jump of size 1.75 inside the second cell.
  const auto p = make_path({0.0, 0.0, 1.75, 1.75}, {{1.5, 1.75}}, 0.1);
  CHECK(ascending_barrier(p) == 1.75);
  CHECK(ascending_barrier(make_path({0.5})) == 0.0);
}

TEST_CASE("ascending barrier equals the brute force on random paths") {
  RngStream rng(21, 1);
  for (int i = 0; i < 1000; ++i) {
    const double h = 0.5 + 4.0 * rng.uniform();
    const double step = h / (2 + static_cast<int>(rng.uniform() * 300));
    const double cutoff = 0.05 + 0.3 * rng.uniform();
    LevyPathGrid path = i % 3 == 0 ? sample_path_grid(kDefault, h, step, rng)
                                   : sample_path_jump_resolved(kDefault, h, step, cutoff, rng);
    const auto ev = event_points(path);
    if (ev.size() > 1000) continue;
    CHECK(ascending_barrier(ev) == brute_events(ev));
    CHECK(ascending_barrier(path) == brute_barrier(path));
  }
}

TEST_CASE("running extrema") {
  const auto r = running_extrema(make_path({0.0, -1.0, 2.0}));
  CHECK(r.running_max == 2.0);
  CHECK(r.running_min == -1.0);
  CHECK(r.bilateral_sup == 2.0);
  const auto z = running_extrema(make_path({0.0, 0.0, 0.0}));
  CHECK(z.running_max == 0.0);
  CHECK(z.running_min == 0.0);
  CHECK(z.bilateral_sup == 0.0);

  RngStream rng(21, 2);
  for (int i = 0; i < 200; ++i) {
    const auto path = sample_path_jump_resolved(kDefault, 1.0, 0.05, 0.1, rng);
    const auto ev = event_points(path);
    double hi = ev.values[0], lo = ev.values[0], sup = 0.0;
    for (double v : ev.values) {
      hi = std::max(hi, v);
      lo = std::min(lo, v);
      sup = std::max(sup, std::abs(v));
    }
    const auto e = running_extrema(path);
    CHECK(e.running_max == hi);
    CHECK(e.running_min == lo);
    CHECK(e.bilateral_sup == sup);
  }
}

TEST_CASE("functional report invariants on sampled paths") {
  RngStream rng(21, 3);
  for (int i = 0; i < 500; ++i) {
    const auto path = i % 2 ? sample_path(kDefault, 10.0, 0.1, Resolution::automatic(), rng)
                            : sample_path(kDefault, 10.0, 0.1, Resolution::grid(), rng);
    const auto r = functional_report(path);
    CHECK(r.consistent());
    CHECK(r.ascending_barrier >= r.largest_jump);
    CHECK(r.largest_jump >= 0.0);
    CHECK(r.bilateral_sup == std::max(std::abs(r.running_max), std::abs(r.running_min)));
    CHECK(r.jumps_resolved == path.resolved());
  }
}

TEST_CASE("shift invariance and scale equivariance") {
  RngStream rng(21, 4);
  for (int i = 0; i < 200; ++i) {
    const auto path = sample_path_jump_resolved(kDefault, 2.0, 0.02, 0.1, rng);
    const auto base = functional_report(path);
    const double tol = 1e-12 * (1.0 + base.bilateral_sup);

    auto shifted = path;
    for (double& v : shifted.values) v += 3.25;
    const auto s = functional_report(shifted);
    CHECK(s.largest_jump == base.largest_jump);
    CHECK(s.ascending_barrier == doctest::Approx(base.ascending_barrier).epsilon(tol));
    CHECK(s.running_max == doctest::Approx(base.running_max + 3.25).epsilon(tol));
    CHECK(s.running_min == doctest::Approx(base.running_min + 3.25).epsilon(tol));

    for (double c : {2.0, 0.7}) {
      auto scaled = path;
      for (double& v : scaled.values) v *= c;
      for (auto& j : scaled.jumps) j.size *= c;
      const auto m = functional_report(scaled);
      CHECK(m.largest_jump == doctest::Approx(c * base.largest_jump).epsilon(1e-15));
      CHECK(m.ascending_barrier == doctest::Approx(c * base.ascending_barrier).epsilon(tol));
      CHECK(m.bilateral_sup == doctest::Approx(c * base.bilateral_sup).epsilon(tol));
      if (c == 2.0) {
        CHECK(m.ascending_barrier == 2.0 * base.ascending_barrier);
      }
    }
  }
}

TEST_CASE("drifted barrier at zero drift is the ascending barrier") {
  RngStream rng(21, 5);
  const auto path = sample_path_jump_resolved(kDefault, 1.0, 0.01, 0.1, rng);
  CHECK(drifted_barrier(path, 0.0) == ascending_barrier(path));
  CHECK_THROWS(drifted_barrier(path, -1.0));
}

TEST_CASE("drifted barrier decreases to the largest jump") {
  RngStream rng(21, 6);
  const std::vector<double> lambdas{10.0, 100.0, 1000.0, 1e4};
  for (int i = 0; i < 100; ++i) {
    const auto path = sample_path(kDefault, 1.0, 1e-3, Resolution::automatic(), rng);
    const double jump = largest_positive_jump(path);
    const double at_zero = drifted_barrier(path, 0.0);
    double prev = at_zero;
    for (double l : lambdas) {
      const double d = drifted_barrier(path, l);
      CHECK(d >= jump);
      if (l == lambdas.front()) {
        // The zero-drift value comes from a different summation order.
        CHECK(d <= prev * (1.0 + 1e-12));
      } else {
        CHECK(d <= prev);
      }
      prev = d;
    }
    CHECK(prev - jump < 1e-6);
  }
}
