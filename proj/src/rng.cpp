#include "slowdrift/rng.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace slowdrift {
namespace {

constexpr std::size_t kChunk = 1024;

double poisson_small(RngStream& rng, double mean) {
  // Inversion by sequential search.
  const double limit = std::exp(-mean);
  double p = limit;
  double cumulative = p;
  const double u = rng.uniform();
  double k = 0.0;
  while (u > cumulative && k < 1000.0) {
    k += 1.0;
    p *= mean / k;
    cumulative += p;
  }
  return k;
}

// Hoermann's transformed rejection with squeeze (PTRS), mean >= 10.
double poisson_ptrs(RngStream& rng, double mean) {
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) {
      return k;
    }
    if (k < 0.0 || (us < 0.013 && v > us)) {
      continue;
    }
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * log_mean - std::lgamma(k + 1.0)) {
      return k;
    }
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_(stream_id),
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

void RngStream::fill_words(std::span<std::uint64_t> out) {
  std::size_t i = 0;
  if (has_spare_word_ && !out.empty()) {
    out[0] = spare_word_;
    has_spare_word_ = false;
    i = 1;
  }
  const std::size_t pairs = (out.size() - i) / 2;
  if (pairs > 0) {
    simd::philox_fill(key_, stream_, block_, out.subspan(i, 2 * pairs));
    block_ += pairs;
    i += 2 * pairs;
  }
  if (i < out.size()) {
    std::array<std::uint64_t, 2> tail{};
    simd::philox_fill(key_, stream_, block_, tail);
    ++block_;
    out[i] = tail[0];
    spare_word_ = tail[1];
    has_spare_word_ = true;
  }
}

std::uint64_t RngStream::next_u64() {
  std::uint64_t w = 0;
  fill_words(std::span<std::uint64_t>(&w, 1));
  return w;
}

double RngStream::uniform() {
  double u = 0.0;
  fill_uniform(std::span<double>(&u, 1));
  return u;
}

void RngStream::fill_uniform(std::span<double> out) {
  std::array<std::uint64_t, kChunk> words;
  for (std::size_t start = 0; start < out.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, out.size() - start);
    fill_words(std::span<std::uint64_t>(words.data(), n));
    simd::words_to_open_unit(std::span<const std::uint64_t>(words.data(), n), out.subspan(start, n));
  }
}

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  double z1 = 0.0;
  double z2 = 0.0;
  simd::scalar::box_muller(std::span<const double>(&u1, 1), std::span<const double>(&u2, 1),
                           std::span<double>(&z1, 1), std::span<double>(&z2, 1));
  spare_normal_ = z2;
  has_spare_normal_ = true;
  return z1;
}

void RngStream::fill_normal(std::span<double> out) {
  constexpr std::size_t half = kChunk / 2;
  std::array<double, kChunk> u;
  std::array<double, kChunk> z;
  for (std::size_t start = 0; start < out.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, out.size() - start);
    const std::size_t pairs = (n + 1) / 2;
    fill_uniform(std::span<double>(u.data(), 2 * pairs));
    simd::box_muller(std::span<const double>(u.data(), pairs),
                     std::span<const double>(u.data() + pairs, pairs),
                     std::span<double>(z.data(), pairs), std::span<double>(z.data() + half, pairs));
    for (std::size_t k = 0; k < n; ++k) {
      out[start + k] = k < pairs ? z[k] : z[half + (k - pairs)];
    }
  }
}

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::gamma(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("gamma: shape must be positive and finite");
  }
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return d * v;
    }
  }
}

double RngStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson: mean must be non-negative and finite");
  }
  if (mean == 0.0) {
    return 0.0;
  }
  if (mean < 10.0) {
    return poisson_small(*this, mean);
  }
  if (mean < 1e15) {
    return poisson_ptrs(*this, mean);
  }
  return std::max(0.0, std::round(mean + std::sqrt(mean) * normal()));
}

}  // namespace slowdrift
