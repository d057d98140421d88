#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slowdrift/simd/kernels.hpp"

namespace slowdrift::simd {
namespace {

// -1: auto, otherwise a Level value.
std::atomic<int> forced_level{-1};

}  // namespace

StableCoeffs StableCoeffs::make(double alpha, double skew) {
  StableCoeffs c;
  const double t = skew * std::tan(std::numbers::pi * alpha / 2.0);
  c.alpha = alpha;
  c.inv_alpha = 1.0 / alpha;
  c.shift = std::atan(t) / alpha;
  c.factor = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
  c.exponent = (1.0 - alpha) / alpha;
  return c;
}

Level detected_level() {
  static const Level level = avx2::available() ? Level::avx2 : Level::scalar;
  return level;
}

Level active_level() {
  const int forced = forced_level.load(std::memory_order_relaxed);
  return forced < 0 ? detected_level() : static_cast<Level>(forced);
}

void force_level(std::optional<Level> level) {
  if (level == Level::avx2 && !avx2::available()) {
    throw std::runtime_error("AVX2/FMA not supported by this CPU");
  }
  forced_level.store(level ? static_cast<int>(*level) : -1, std::memory_order_relaxed);
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::scalar:
      return "scalar";
    case Level::avx2:
      return "avx2";
  }
  return "unknown";
}

void philox_fill(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,
                 std::span<std::uint64_t> out) {
  if (active_level() == Level::avx2) {
    avx2::philox_fill(key, stream, first_block, out);
  } else {
    scalar::philox_fill(key, stream, first_block, out);
  }
}

void words_to_open_unit(std::span<const std::uint64_t> words, std::span<double> out) {
  if (active_level() == Level::avx2) {
    avx2::words_to_open_unit(words, out);
  } else {
    scalar::words_to_open_unit(words, out);
  }
}

void stable_transform(const StableCoeffs& c, std::span<const double> u_angle,
                      std::span<const double> u_exp, std::span<double> out) {
  if (active_level() == Level::avx2) {
    avx2::stable_transform(c, u_angle, u_exp, out);
  } else {
    scalar::stable_transform(c, u_angle, u_exp, out);
  }
}

void box_muller(std::span<const double> u1, std::span<const double> u2, std::span<double> z1,
                std::span<double> z2) {
  if (active_level() == Level::avx2) {
    avx2::box_muller(u1, u2, z1, z2);
  } else {
    scalar::box_muller(u1, u2, z1, z2);
  }
}

void exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  if (active_level() == Level::avx2) {
    avx2::exp_shifted(x, shift, out);
  } else {
    scalar::exp_shifted(x, shift, out);
  }
}

MinMax minmax(std::span<const double> x) {
  if (x.empty()) {
    throw std::invalid_argument("minmax: empty input");
  }
  return active_level() == Level::avx2 ? avx2::minmax(x) : scalar::minmax(x);
}

}  // namespace slowdrift::simd
