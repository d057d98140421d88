#include "slowdrift/stable.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "slowdrift/simd/kernels.hpp"

namespace slowdrift {
namespace {

constexpr std::size_t kChunk = 512;

void check_alpha(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw std::invalid_argument("alpha must lie in (1, 2), got " + std::to_string(alpha));
  }
}

std::size_t grid_cells(double horizon, double step, const SamplerLimits& limits) {
  if (!(horizon > 0.0) || !(step > 0.0) || !std::isfinite(horizon) || !std::isfinite(step)) {
    throw std::invalid_argument("horizon and step must be positive and finite");
  }
  const double ratio = horizon / step;
  if (ratio < 2.0 - 1e-9) {
    throw std::invalid_argument("horizon / step must be at least 2");
  }
  if (ratio + 1.0 > static_cast<double>(limits.max_grid_points)) {
    throw std::length_error("grid of " + std::to_string(ratio) +
                            " cells exceeds the configured point budget");
  }
  return static_cast<std::size_t>(std::llround(ratio));
}

// Poisson point process of jumps with |size| > cutoff on (0, horizon) and
// Levy density c / x^(1+alpha) on one side; appended to `jumps`.
void add_big_jumps(double c, double sign, double alpha, double horizon, double cutoff,
                   RngStream& rng, std::vector<JumpMark>& jumps) {
  if (c <= 0.0) {
    return;
  }
  const double mean = horizon * c / (alpha * std::pow(cutoff, alpha));
  const double count = rng.poisson(mean);
  if (count > 5e7) {
    throw std::length_error("cutoff too small: expected " + std::to_string(mean) + " jumps");
  }
  const auto n = static_cast<std::size_t>(count);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = horizon * rng.uniform();
    const double size = cutoff * std::pow(rng.uniform(), -1.0 / alpha);
    jumps.push_back({t, sign * size});
  }
}

}  // namespace

void StablePotentialParams::validate(bool require_positive_jumps) const {
  check_alpha(alpha);
  if (!(c_plus >= 0.0) || !(c_minus >= 0.0) || !(c_plus + c_minus > 0.0)) {
    throw std::invalid_argument("need c_plus, c_minus >= 0 with c_plus + c_minus > 0");
  }
  if (!std::isfinite(c_plus) || !std::isfinite(c_minus)) {
    throw std::invalid_argument("jump intensities must be finite");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("delta must be positive");
  }
  if (require_positive_jumps && !(c_plus > 0.0)) {
    throw std::invalid_argument("this experiment needs c_plus > 0");
  }
}

double Resolution::cutoff(const StablePotentialParams& params, double horizon) const {
  switch (kind) {
    case Kind::grid:
      return 0.0;
    case Kind::automatic:
      return default_cutoff(params, horizon);
    case Kind::fixed:
      if (!(value > 0.0)) {
        throw std::invalid_argument("fixed cutoff must be positive");
      }
      return value;
  }
  return 0.0;
}

double sample_standard_stable(double alpha, double skew, RngStream& rng) {
  check_alpha(alpha);
  if (!(std::abs(skew) <= 1.0)) {
    throw std::invalid_argument("skew must lie in [-1, 1]");
  }
  const auto coeffs = simd::StableCoeffs::make(alpha, skew);
  std::array<double, 2> u{};
  rng.fill_uniform(u);
  double x = 0.0;
  simd::stable_transform(coeffs, std::span<const double>(&u[0], 1),
                         std::span<const double>(&u[1], 1), std::span<double>(&x, 1));
  return x;
}

double stable_tail_constant(double alpha) {
  check_alpha(alpha);
  return (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

double stable_scale_for_intensity(double c, double alpha) {
  check_alpha(alpha);
  if (!(c > 0.0)) {
    throw std::invalid_argument("intensity must be positive");
  }
  return std::pow(c / (alpha * stable_tail_constant(alpha)), 1.0 / alpha);
}

IncrementLaw increment_law(const StablePotentialParams& params) {
  params.validate();
  const double total = params.c_plus + params.c_minus;
  return {stable_scale_for_intensity(total, params.alpha),
          (params.c_plus - params.c_minus) / total};
}

double sample_increment(const StablePotentialParams& params, double dt, RngStream& rng) {
  double x = 0.0;
  fill_increments(params, dt, rng, std::span<double>(&x, 1));
  return x;
}

void fill_increments(const StablePotentialParams& params, double dt, RngStream& rng,
                     std::span<double> out) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("dt must be positive");
  }
  const IncrementLaw law = increment_law(params);
  const auto coeffs = simd::StableCoeffs::make(params.alpha, law.skew);
  const double scale = law.scale * std::pow(dt, 1.0 / params.alpha);
  std::array<double, 2 * kChunk> u;
  for (std::size_t start = 0; start < out.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, out.size() - start);
    rng.fill_uniform(std::span<double>(u.data(), 2 * n));
    auto dst = out.subspan(start, n);
    simd::stable_transform(coeffs, std::span<const double>(u.data(), n),
                           std::span<const double>(u.data() + n, n), dst);
    for (double& x : dst) {
      x *= scale;
    }
  }
}

LevyPathGrid sample_path_grid(const StablePotentialParams& params, double horizon, double step,
                              RngStream& rng, const SamplerLimits& limits) {
  params.validate();
  const std::size_t cells = grid_cells(horizon, step, limits);
  LevyPathGrid path;
  path.horizon = horizon;
  path.step = horizon / static_cast<double>(cells);
  path.values.assign(cells + 1, 0.0);
  fill_increments(params, path.step, rng, std::span<double>(path.values).subspan(1));
  for (std::size_t k = 1; k <= cells; ++k) {
    path.values[k] += path.values[k - 1];
  }
  return path;
}

LevyPathGrid sample_path_jump_resolved(const StablePotentialParams& params, double horizon,
                                       double step, double cutoff, RngStream& rng,
                                       const SamplerLimits& limits) {
  params.validate();
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
    throw std::invalid_argument("cutoff must be positive");
  }
  const std::size_t cells = grid_cells(horizon, step, limits);
  const double amplitude = increment_law(params).scale * std::pow(horizon, 1.0 / params.alpha);
  if (cutoff >= limits.max_cutoff_fraction * amplitude) {
    throw std::invalid_argument("cutoff " + std::to_string(cutoff) +
                                " is not small against the path amplitude " +
                                std::to_string(amplitude));
  }
  const double alpha = params.alpha;

  LevyPathGrid path;
  path.horizon = horizon;
  path.step = horizon / static_cast<double>(cells);
  path.cutoff = cutoff;
  add_big_jumps(params.c_plus, 1.0, alpha, horizon, cutoff, rng, path.jumps);
  add_big_jumps(params.c_minus, -1.0, alpha, horizon, cutoff, rng, path.jumps);
  std::sort(path.jumps.begin(), path.jumps.end(),
            [](const JumpMark& a, const JumpMark& b) { return a.time < b.time; });

  const double variance =
      (params.c_plus + params.c_minus) * std::pow(cutoff, 2.0 - alpha) / (2.0 - alpha);
  const double drift = -(params.c_plus - params.c_minus) * std::pow(cutoff, 1.0 - alpha) /
                       (alpha - 1.0);
  const double sd = std::sqrt(variance * path.step);

  path.values.assign(cells + 1, 0.0);
  auto increments = std::span<double>(path.values).subspan(1);
  rng.fill_normal(increments);
  std::size_t next = 0;
  for (std::size_t k = 0; k < cells; ++k) {
    double inc = drift * path.step + sd * increments[k];
    const double t1 = k + 1 == cells ? horizon : path.time_at(k + 1);
    while (next < path.jumps.size() && (path.jumps[next].time <= t1 || k + 1 == cells)) {
      inc += path.jumps[next].size;
      ++next;
    }
    path.values[k + 1] = path.values[k] + inc;
  }
  return path;
}

LevyPathGrid sample_path(const StablePotentialParams& params, double horizon, double step,
                         const Resolution& resolution, RngStream& rng,
                         const SamplerLimits& limits) {
  const double cutoff = resolution.cutoff(params, horizon);
  if (cutoff == 0.0) {
    return sample_path_grid(params, horizon, step, rng, limits);
  }
  return sample_path_jump_resolved(params, horizon, step, cutoff, rng, limits);
}

double sample_largest_jump_exact(double c_plus, double alpha, double horizon, RngStream& rng) {
  check_alpha(alpha);
  if (!(c_plus > 0.0)) {
    throw std::invalid_argument("largest positive jump needs c_plus > 0");
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("horizon must be positive");
  }
  return std::pow(horizon * c_plus / (alpha * rng.exponential()), 1.0 / alpha);
}

double default_cutoff(const StablePotentialParams& params, double horizon) {
  params.validate();
  const double c = params.c_plus > 0.0 ? params.c_plus : params.c_minus;
  const double k = c * horizon / params.alpha;
  // exp(-k x^-alpha) = 1e-3
  return std::pow(k / std::log(1000.0), 1.0 / params.alpha);
}

LevyPathGrid negative_side_path(const StablePotentialParams& params, double depth, double step,
                                const Resolution& resolution, RngStream& rng,
                                const SamplerLimits& limits) {
  LevyPathGrid path = sample_path(params, depth, step, resolution, rng, limits);
  for (double& v : path.values) {
    v = -v;
  }
  path.values[0] = 0.0;
  for (JumpMark& j : path.jumps) {
    j.size = -j.size;
  }
  return path;
}

}  // namespace slowdrift
