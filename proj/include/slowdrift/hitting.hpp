#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "slowdrift/path.hpp"
#include "slowdrift/potential.hpp"
#include "slowdrift/rng.hpp"
#include "slowdrift/stable.hpp"

namespace slowdrift {

enum class Engine { rayknight, chain };

std::string_view engine_name(Engine e);

/// One replica of the hitting time H(r) = I1(r) + I2(r).
struct HittingTimeSample {
  double r = 0.0;
  double log_I1 = 0.0;
  double I2 = 0.0;  // linear scale; +inf if beyond double range
  double log_I2 = 0.0;
  double log_H = 0.0;
  Engine engine = Engine::rayknight;
  bool I2_omitted = false;
  /// Points whose BESQ increment vanished below double resolution.
  std::size_t merged_points = 0;
};

/// Squared Bessel process of dimension 2 started at 0.
struct BesqPath {
  std::vector<double> times;
  std::vector<double> values;
};

/// Exact joint draw of U(t) = W1(t)^2 + W2(t)^2 at sorted positive times.
BesqPath besq2_at(std::span<const double> times, RngStream& rng);

/// Exact BESQ(0) transition from x over time t: Gamma(N, 2t) with
/// N ~ Poisson(x / (2t)), 0 if N = 0.
double besq0_transition(double x, double t, RngStream& rng);

/// Same law in log coordinates; returns -inf when absorbed. Poisson means
/// above 1e12 use the Gaussian limit of the compound law.
double besq0_transition_log(double log_x, double log_t, RngStream& rng);

struct RayKnightResult {
  double log_I1 = 0.0;
  /// log of the local time at level 0, A(r) U(1), which starts the
  /// negative-side continuation.
  double log_local_time_zero = 0.0;
  double log_A_r = 0.0;
  std::size_t merged_points = 0;
};

/// log of A(r) int_0^r exp(-V_y) U((A(r) - A(y)) / A(r)) dy with U a BESQ(2)
/// drawn exactly at the segment boundaries of the potential; exp(-V) is
/// piecewise constant and U enters through its trapezoid average on each
/// segment.
RayKnightResult rayknight_I1(const Segments& potential, const ScaleFunction& sf, RngStream& rng);
RayKnightResult rayknight_I1(const LevyPathGrid& potential, const ScaleFunction& sf,
                             RngStream& rng);

/// log I2: int_0^depth exp(-V_{-y}) Lambda(A(0) - A(-y)) dy with Lambda a
/// BESQ(0) started from the local time at 0. -inf when log_u0 = -inf.
double I2_estimate_log(const LevyPathGrid& negative_potential, double log_u0, RngStream& rng);

/// Linear-scale wrapper; u0 is the local time at level 0.
double I2_estimate(const StablePotentialParams& params, const LevyPathGrid& negative_potential,
                   double u0, RngStream& rng);

struct HittingOptions {
  double step = 0.1;
  Resolution resolution = Resolution::automatic();
  bool include_I2 = false;
  /// Tolerance handed to negative_truncation_depth.
  double depth_tol = 1e-6;
  SamplerLimits limits{};
  /// Called with every potential sampled for a replica (positive half-line
  /// first); for diagnostics only.
  std::function<void(const LevyPathGrid&)> on_potential;
};

/// Fresh potential on [0, r] (and on the negative side when I2 is included),
/// then the Ray-Knight representation.
HittingTimeSample hitting_time_rayknight(const StablePotentialParams& params, double r,
                                         const HittingOptions& options, RngStream& rng);

/// Ray-Knight engine on given potentials; `negative` may be null.
HittingTimeSample hitting_time_rayknight(const LevyPathGrid& positive,
                                         const LevyPathGrid* negative, RngStream& rng);

/// Birth-death chain on the sites i h, -M <= i <= N = r / h, of a potential
/// that is piecewise constant inside each cell up to resolved jumps.
struct ChainEnvironment {
  double step = 0.0;
  std::size_t n_positive = 0;  // N
  std::size_t n_negative = 0;  // M
  /// Per cell c = -M .. N-1, stored at index c + M: log of the scale length,
  /// and log of the expected-occupation integrals
  /// int (s(y) - s(left end)) 2 exp(-V) dy and int (s(right end) - s(y)) 2 exp(-V) dy.
  std::vector<double> log_dA;
  std::vector<double> log_from_left;
  std::vector<double> log_from_right;

  /// Probability of stepping right from site i (1 at the reflecting wall).
  double p_right(long site) const;
  double log_p_right(long site) const;
  double log_p_left(long site) const;
  /// log of the expected time per visit to site i until a neighbour is reached.
  double log_hold(long site) const;
};

/// `positive` is V on [0, r] and `negative` is y -> V_{-y} on [0, M h]; both
/// must share the step.
ChainEnvironment chain_environment(const LevyPathGrid& positive, const LevyPathGrid& negative);

/// One replica of the chain's hitting time of site N given the environment:
/// visit counts are drawn exactly (negative binomial branching of edge
/// crossings), holding times enter through their conditional means.
HittingTimeSample hitting_time_chain(const ChainEnvironment& env, RngStream& rng);

/// Fresh environment, then one chain replica. Requires r / step <= 1e4.
HittingTimeSample hitting_time_chain(const StablePotentialParams& params, double r,
                                     const HittingOptions& options, RngStream& rng);

}  // namespace slowdrift
