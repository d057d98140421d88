#include "slowdrift/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "slowdrift/logsum.hpp"

namespace slowdrift {
namespace {

constexpr double kLn2 = std::numbers::ln2;
// log(1e12): above this Poisson mean the BESQ(0) step is Gaussian.
constexpr double kLogGaussianMean = 27.631021115928547;

// Sub-segments of one grid cell, in the path's own orientation; all in logs.
struct CellIntegrals {
  double log_dA;
  double from_start;  // log int (s(y) - s(cell start)) 2 exp(-V) dy
  double from_end;    // log int (s(cell end) - s(y)) 2 exp(-V) dy
};

// Segment [t_i, t_{i+1}) contributes 2 exp(-v) P w + w^2, where P is the
// scale length between the measured end and the segment.
double occupation_term(double log_scale_before, double v, double log_w) {
  return log_add_exp(kLn2 + log_scale_before - v + log_w, 2.0 * log_w);
}

CellIntegrals cell_integrals(const EventPoints& ev, std::size_t first, std::size_t last) {
  std::vector<double> log_w;
  std::vector<double> v;
  for (std::size_t i = first; i < last; ++i) {
    const double w = ev.times[i + 1] - ev.times[i];
    if (w > 0.0) {
      log_w.push_back(std::log(w));
      v.push_back(ev.values[i]);
    }
  }
  if (log_w.empty()) {
    throw std::invalid_argument("chain_environment: empty grid cell");
  }
  const std::size_t n = log_w.size();
  LogAccumulator before;
  LogAccumulator start;
  for (std::size_t i = 0; i < n; ++i) {
    start.add(occupation_term(before.value(), v[i], log_w[i]));
    before.add(v[i] + log_w[i]);
  }
  LogAccumulator after;
  LogAccumulator end;
  for (std::size_t i = n; i-- > 0;) {
    end.add(occupation_term(after.value(), v[i], log_w[i]));
    after.add(v[i] + log_w[i]);
  }
  return {before.value(), start.value(), end.value()};
}

// log(1 + e^d)
double softplus(double d) { return log_add_exp(0.0, d); }

// log of a count, rounded back to an integer while it is exactly representable.
constexpr double kLogExactCount = 27.631021115928547;  // log(1e12)

double log_count(double n) { return n > 0.0 ? std::log(n) : kNegInf; }

// log of a NB(u, p) draw (failures before the u-th success) with odds
// (1 - p) / p = exp(log_rho), as Poisson(Gamma(u) rho). Counts beyond 1e12
// use the Gaussian limits of both stages.
double log_negative_binomial(double log_u, double log_rho, RngStream& rng) {
  if (log_u == kNegInf) {
    return kNegInf;
  }
  double log_g;
  if (log_u < kLogExactCount) {
    log_g = std::log(rng.gamma(std::round(std::exp(log_u))));
  } else {
    log_g = log_u + std::log1p(std::exp(-0.5 * log_u) * rng.normal());
  }
  const double log_mean = log_g + log_rho;
  if (log_mean < kLogExactCount) {
    return log_count(rng.poisson(std::exp(log_mean)));
  }
  return log_mean + std::log1p(std::exp(-0.5 * log_mean) * rng.normal());
}

// Step actually used on [0, r]: r divided into a whole number of cells.
double grid_step(double r, double step) {
  return r / std::max(1.0, std::round(r / step));
}

// Negative-side potential y -> V_{-y} on a whole number of cells of width h
// covering the truncation depth.
LevyPathGrid sample_negative_potential(const StablePotentialParams& params, double h,
                                       const HittingOptions& options, RngStream& rng) {
  const double depth = negative_truncation_depth(params, options.depth_tol);
  const double cells = std::max(2.0, std::ceil(depth / h - 1e-9));
  return negative_potential_path(
      negative_side_path(params, cells * h, h, options.resolution, rng, options.limits),
      params.delta);
}

}  // namespace

std::string_view engine_name(Engine e) {
  return e == Engine::rayknight ? "rayknight" : "chain";
}

BesqPath besq2_at(std::span<const double> times, RngStream& rng) {
  BesqPath out;
  out.times.assign(times.begin(), times.end());
  out.values.resize(times.size());
  double prev = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (!(t > prev) && !(i == 0 && t > 0.0)) {
      throw std::invalid_argument("besq2_at: times must be positive and increasing");
    }
    const double sd = std::sqrt(t - prev);
    w1 += sd * rng.normal();
    w2 += sd * rng.normal();
    out.values[i] = w1 * w1 + w2 * w2;
    prev = t;
  }
  return out;
}

double besq0_transition(double x, double t, RngStream& rng) {
  if (!(x >= 0.0) || !(t > 0.0)) {
    throw std::invalid_argument("besq0_transition: need x >= 0 and t > 0");
  }
  if (x == 0.0) {
    return 0.0;
  }
  const double n = rng.poisson(x / (2.0 * t));
  if (n == 0.0) {
    return 0.0;
  }
  return 2.0 * t * rng.gamma(n);
}

double besq0_transition_log(double log_x, double log_t, RngStream& rng) {
  if (log_x == kNegInf) {
    return kNegInf;
  }
  const double log_mean = log_x - kLn2 - log_t;
  if (log_mean > kLogGaussianMean) {
    // Mean x, variance 4 t x.
    const double rel = 2.0 * std::exp(0.5 * (log_t - log_x)) * rng.normal();
    return log_x + std::log1p(rel);
  }
  const double n = rng.poisson(std::exp(log_mean));
  if (n == 0.0) {
    return kNegInf;
  }
  return std::log(rng.gamma(n)) + kLn2 + log_t;
}

RayKnightResult rayknight_I1(const Segments& seg, const ScaleFunction& sf, RngStream& rng) {
  const std::size_t n = seg.size();
  if (n == 0 || sf.log_increments.size() != n) {
    throw std::invalid_argument("rayknight_I1: scale function does not match the potential");
  }
  const std::vector<double> suffix = suffix_log_sum_exp(sf.log_increments);
  const double log_a = suffix[0];

  // U at u_j = (A(r) - A(y_j)) / A(r), walking from u_n = 0 up to u_0 = 1.
  // The planar Brownian motion is kept as exp(s) (w1, w2) so that variances
  // far below the double range stay representable.
  std::vector<double> z(2 * n);
  rng.fill_normal(z);
  std::vector<double> log_u(n + 1, kNegInf);
  RayKnightResult res;
  res.log_A_r = log_a;
  double s = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  bool started = false;
  for (std::size_t j = n; j-- > 0;) {
    const double half_log_var = 0.5 * (sf.log_increments[j] - log_a);
    if (!started) {
      s = half_log_var;
      w1 = z[2 * j];
      w2 = z[2 * j + 1];
      started = true;
    } else {
      const double rel = half_log_var - s;
      if (rel < -40.0) {
        ++res.merged_points;
      }
      const double f = std::exp(rel);
      w1 += f * z[2 * j];
      w2 += f * z[2 * j + 1];
    }
    double norm2 = w1 * w1 + w2 * w2;
    if (norm2 > 1e100 || (norm2 < 1e-100 && norm2 > 0.0)) {
      const double radius = std::sqrt(norm2);
      s += std::log(radius);
      w1 /= radius;
      w2 /= radius;
      norm2 = w1 * w1 + w2 * w2;
    }
    log_u[j] = norm2 > 0.0 ? 2.0 * s + std::log(norm2) : kNegInf;
  }

  std::vector<double> terms(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double log_w = std::log(seg.widths[j]);
    terms[j] = -seg.values[j] + log_w + log_add_exp(log_u[j], log_u[j + 1]) - kLn2 + log_a;
  }
  res.log_I1 = log_sum_exp(terms);
  res.log_local_time_zero = log_a + log_u[0];
  return res;
}

RayKnightResult rayknight_I1(const LevyPathGrid& potential, const ScaleFunction& sf,
                             RngStream& rng) {
  return rayknight_I1(segments(event_points(potential)), sf, rng);
}

double I2_estimate_log(const LevyPathGrid& negative_potential, double log_u0, RngStream& rng) {
  if (log_u0 == kNegInf) {
    return kNegInf;
  }
  const Segments seg = segments(event_points(negative_potential));
  LogAccumulator acc;
  double log_level = log_u0;
  for (std::size_t k = 0; k < seg.size() && log_level != kNegInf; ++k) {
    const double log_w = std::log(seg.widths[k]);
    const double next = besq0_transition_log(log_level, seg.values[k] + log_w, rng);
    acc.add(-seg.values[k] + log_w + log_add_exp(log_level, next) - kLn2);
    log_level = next;
  }
  return acc.value();
}

double I2_estimate(const StablePotentialParams& params, const LevyPathGrid& negative_potential,
                   double u0, RngStream& rng) {
  params.validate();
  if (!(u0 >= 0.0)) {
    throw std::invalid_argument("I2_estimate: u0 must be non-negative");
  }
  return std::exp(I2_estimate_log(negative_potential, u0 == 0.0 ? kNegInf : std::log(u0), rng));
}

HittingTimeSample hitting_time_rayknight(const LevyPathGrid& positive,
                                         const LevyPathGrid* negative, RngStream& rng) {
  const Segments seg = segments(event_points(positive));
  const ScaleFunction sf = scale_function(seg);
  const RayKnightResult rk = rayknight_I1(seg, sf, rng);
  HittingTimeSample out;
  out.r = positive.horizon;
  out.engine = Engine::rayknight;
  out.log_I1 = rk.log_I1;
  out.merged_points = rk.merged_points;
  if (negative == nullptr) {
    out.I2_omitted = true;
    out.I2 = 0.0;
    out.log_I2 = kNegInf;
    out.log_H = out.log_I1;
    return out;
  }
  out.log_I2 = I2_estimate_log(*negative, rk.log_local_time_zero, rng);
  out.I2 = std::exp(out.log_I2);
  out.log_H = std::max(out.log_I1, log_add_exp(out.log_I1, out.log_I2));
  return out;
}

HittingTimeSample hitting_time_rayknight(const StablePotentialParams& params, double r,
                                         const HittingOptions& options, RngStream& rng) {
  params.validate();
  if (!(r > 0.0)) {
    throw std::invalid_argument("hitting_time_rayknight: r must be positive");
  }
  const double h = grid_step(r, options.step);
  const LevyPathGrid positive =
      potential_path(sample_path(params, r, h, options.resolution, rng, options.limits), params.delta);
  if (options.on_potential) options.on_potential(positive);
  if (!options.include_I2) {
    return hitting_time_rayknight(positive, nullptr, rng);
  }
  const LevyPathGrid negative = sample_negative_potential(params, h, options, rng);
  if (options.on_potential) options.on_potential(negative);
  return hitting_time_rayknight(positive, &negative, rng);
}

double ChainEnvironment::log_p_right(long site) const {
  const long m = static_cast<long>(n_negative);
  if (site == -m) {
    return 0.0;
  }
  const auto c = static_cast<std::size_t>(site + m);
  return -softplus(log_dA[c] - log_dA[c - 1]);
}

double ChainEnvironment::log_p_left(long site) const {
  const long m = static_cast<long>(n_negative);
  if (site == -m) {
    return kNegInf;
  }
  const auto c = static_cast<std::size_t>(site + m);
  const double d = log_dA[c] - log_dA[c - 1];
  return d - softplus(d);
}

double ChainEnvironment::p_right(long site) const { return std::exp(log_p_right(site)); }

double ChainEnvironment::log_hold(long site) const {
  const long m = static_cast<long>(n_negative);
  const auto c = static_cast<std::size_t>(site + m);
  if (site == -m) {
    return log_from_right[c];
  }
  return log_add_exp(log_p_left(site) + log_from_left[c - 1],
                     log_p_right(site) + log_from_right[c]);
}

ChainEnvironment chain_environment(const LevyPathGrid& positive, const LevyPathGrid& negative) {
  if (positive.cells() == 0 || negative.cells() == 0) {
    throw std::invalid_argument("chain_environment: empty potential");
  }
  if (std::abs(positive.step - negative.step) > 1e-12 * positive.step) {
    throw std::invalid_argument("chain_environment: both half-lines need the same step");
  }
  ChainEnvironment env;
  env.step = positive.step;
  env.n_positive = positive.cells();
  env.n_negative = negative.cells();
  const std::size_t total = env.n_positive + env.n_negative;
  env.log_dA.resize(total);
  env.log_from_left.resize(total);
  env.log_from_right.resize(total);

  // Negative cells: y-cell j is the x-cell -j-1, with the ends swapped.
  const EventPoints neg = event_points(negative);
  for (std::size_t j = 0; j < env.n_negative; ++j) {
    const CellIntegrals c = cell_integrals(neg, neg.grid_index[j], neg.grid_index[j + 1]);
    const std::size_t idx = env.n_negative - 1 - j;
    env.log_dA[idx] = c.log_dA;
    env.log_from_left[idx] = c.from_end;
    env.log_from_right[idx] = c.from_start;
  }
  const EventPoints pos = event_points(positive);
  for (std::size_t k = 0; k < env.n_positive; ++k) {
    const CellIntegrals c = cell_integrals(pos, pos.grid_index[k], pos.grid_index[k + 1]);
    const std::size_t idx = env.n_negative + k;
    env.log_dA[idx] = c.log_dA;
    env.log_from_left[idx] = c.from_start;
    env.log_from_right[idx] = c.from_end;
  }
  return env;
}

HittingTimeSample hitting_time_chain(const ChainEnvironment& env, RngStream& rng) {
  const long n = static_cast<long>(env.n_positive);
  const long m = static_cast<long>(env.n_negative);
  // Down-crossings of the edge (i-1, i) are negative binomial given the
  // up-crossings of (i, i+1); the recursion runs from the target down.
  // Counts are kept as logs since deep wells make them astronomically large.
  double log_down_above = kNegInf;  // log Z_{i+1}
  LogAccumulator time_positive;
  LogAccumulator time_negative;
  for (long i = n - 1; i >= -m; --i) {
    double log_up = i >= 0 ? log_add_exp(log_down_above, 0.0) : log_down_above;
    if (log_up < kLogExactCount) {
      log_up = log_count(std::round(std::exp(log_up)));
    }
    double log_down = kNegInf;
    if (i > -m) {
      const auto c = static_cast<std::size_t>(i + m);
      log_down = log_negative_binomial(log_up, env.log_dA[c] - env.log_dA[c - 1], rng);
    }
    const double log_visits = log_add_exp(log_up, log_down);
    if (log_visits != kNegInf) {
      if (i >= 1) {
        time_positive.add(log_visits + env.log_hold(i));
      } else if (i == 0) {
        const auto c = static_cast<std::size_t>(m);
        time_positive.add(log_visits + env.log_p_right(0) + env.log_from_right[c]);
        time_negative.add(log_visits + env.log_p_left(0) + env.log_from_left[c - 1]);
      } else {
        time_negative.add(log_visits + env.log_hold(i));
      }
    }
    log_down_above = log_down;
  }
  HittingTimeSample out;
  out.r = static_cast<double>(n) * env.step;
  out.engine = Engine::chain;
  out.log_I1 = time_positive.value();
  out.log_I2 = time_negative.value();
  out.I2 = std::exp(out.log_I2);
  out.log_H = std::max(out.log_I1, log_add_exp(out.log_I1, out.log_I2));
  return out;
}

HittingTimeSample hitting_time_chain(const StablePotentialParams& params, double r,
                                     const HittingOptions& options, RngStream& rng) {
  params.validate();
  if (!(r > 0.0) || !(options.step > 0.0)) {
    throw std::invalid_argument("hitting_time_chain: r and step must be positive");
  }
  if (r / options.step > 1e4) {
    throw std::invalid_argument("hitting_time_chain: r / step = " + std::to_string(r / options.step) +
                                " exceeds 1e4; use the Ray-Knight engine");
  }
  const double h = grid_step(r, options.step);
  const LevyPathGrid positive =
      potential_path(sample_path(params, r, h, options.resolution, rng, options.limits), params.delta);
  const LevyPathGrid negative = sample_negative_potential(params, h, options, rng);
  if (options.on_potential) {
    options.on_potential(positive);
    options.on_potential(negative);
  }
  return hitting_time_chain(chain_environment(positive, negative), rng);
}

}  // namespace slowdrift
