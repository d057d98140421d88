#pragma once

#include <cstddef>
#include <span>

#include "slowdrift/path.hpp"
#include "slowdrift/rng.hpp"

namespace slowdrift {

/// Law of the potential V_x = S_x - delta x, where S is strictly alpha-stable
/// with Levy density c_plus / x^(1+alpha) on x > 0 and c_minus / |x|^(1+alpha)
/// on x < 0.
struct StablePotentialParams {
  double alpha = 1.5;
  double c_plus = 1.0;
  double c_minus = 1.0;
  double delta = 1.0;

  /// Throws std::invalid_argument unless 1 < alpha < 2, c_plus, c_minus >= 0,
  /// c_plus + c_minus > 0 and delta > 0. Theorem-level experiments also need
  /// positive jumps.
  void validate(bool require_positive_jumps = false) const;
};

struct SamplerLimits {
  /// Grids with more points are rejected.
  std::size_t max_grid_points = 50'000'000;
  /// A jump cutoff at or above this fraction of the stable scale at the
  /// horizon leaves nothing to resolve and is rejected.
  double max_cutoff_fraction = 1.0;
};

/// How the jump structure of a sampled path is resolved.
struct Resolution {
  enum class Kind { grid, automatic, fixed };
  Kind kind = Kind::automatic;
  double value = 0.0;

  static Resolution grid() { return {Kind::grid, 0.0}; }
  static Resolution automatic() { return {Kind::automatic, 0.0}; }
  static Resolution fixed(double cutoff) { return {Kind::fixed, cutoff}; }

  /// Cutoff to use on [0, horizon]; 0 for grid-only paths.
  double cutoff(const StablePotentialParams& params, double horizon) const;
};

/// One draw of S(alpha, skew, 1, 0) by Chambers-Mallows-Stuck; zero mean.
double sample_standard_stable(double alpha, double skew, RngStream& rng);

/// C_alpha with P{X > x} ~ C_alpha (1 + skew) / 2 * x^-alpha for a standard
/// draw: (1 - alpha) / (Gamma(2 - alpha) cos(pi alpha / 2)).
double stable_tail_constant(double alpha);

/// Scale sigma such that sigma * X, X ~ S(alpha, 1, 1, 0), has upper tail
/// c / (alpha x^alpha), i.e. positive Levy density c / x^(1+alpha).
double stable_scale_for_intensity(double c, double alpha);

/// Scale and skewness of S_1 for the two-sided intensities.
struct IncrementLaw {
  double scale;
  double skew;
};
IncrementLaw increment_law(const StablePotentialParams& params);

/// One draw distributed as S_dt.
double sample_increment(const StablePotentialParams& params, double dt, RngStream& rng);

/// Independent draws distributed as S_dt, batched through the SIMD kernel.
void fill_increments(const StablePotentialParams& params, double dt, RngStream& rng,
                     std::span<double> out);

/// Cumulative sums of independent increments; jumps unresolved (cutoff 0).
/// The number of cells is round(horizon / step) and the stored step is
/// horizon / cells.
LevyPathGrid sample_path_grid(const StablePotentialParams& params, double horizon, double step,
                              RngStream& rng, const SamplerLimits& limits = {});

/// Jumps with |size| > cutoff sampled exactly as a Poisson point process; the
/// compensated small-jump remainder is a Brownian surrogate with variance
/// (c_plus + c_minus) cutoff^(2-alpha) / (2-alpha) per unit time and the
/// compensating drift of the removed big jumps.
LevyPathGrid sample_path_jump_resolved(const StablePotentialParams& params, double horizon,
                                       double step, double cutoff, RngStream& rng,
                                       const SamplerLimits& limits = {});

/// Grid-only or jump-resolved path according to `resolution`.
LevyPathGrid sample_path(const StablePotentialParams& params, double horizon, double step,
                         const Resolution& resolution, RngStream& rng,
                         const SamplerLimits& limits = {});

/// Exact largest positive jump of S on [0, horizon]:
/// (horizon c_plus / (alpha E))^(1/alpha) with E unit exponential.
double sample_largest_jump_exact(double c_plus, double alpha, double horizon, RngStream& rng);

/// 0.1% quantile of the largest-positive-jump law on [0, horizon] (the total
/// jump intensity is used when c_plus = 0).
double default_cutoff(const StablePotentialParams& params, double horizon);

/// (V_{-y} + delta y, 0 <= y <= depth) = -(independent copy of S): the
/// potential on the negative half-line before the drift is applied, with jump
/// sizes mirrored.
LevyPathGrid negative_side_path(const StablePotentialParams& params, double depth, double step,
                                const Resolution& resolution, RngStream& rng,
                                const SamplerLimits& limits = {});

}  // namespace slowdrift
