#pragma once

// Data-parallel inner loops of the samplers and quadratures.
//
// Every kernel has a portable scalar reference (namespace `scalar`) and, on
// x86-64, an AVX2+FMA variant (namespace `avx2`). Both variants evaluate the
// same operation sequence with correctly rounded primitives (add, mul, fma,
// div, sqrt, round), so their outputs are bit-identical. The dispatching
// entry points pick the best level supported by the running CPU.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace slowdrift::simd {

enum class Level { scalar, avx2 };

/// Highest level the running CPU supports.
Level detected_level();

/// Level used by the dispatching entry points.
Level active_level();

/// Pin the dispatch level (e.g. for equivalence tests); nullopt restores
/// auto-detection. Requesting avx2 on a CPU without it throws.
void force_level(std::optional<Level> level);

std::string_view level_name(Level level);

/// Precomputed constants of the Chambers-Mallows-Stuck transform for a
/// standard strictly stable law S(alpha, beta, 1, 0), 1 < alpha < 2.
struct StableCoeffs {
  double alpha = 1.5;
  double inv_alpha = 1.0 / 1.5;
  double shift = 0.0;     // B = atan(beta * tan(pi alpha / 2)) / alpha
  double factor = 1.0;    // (1 + beta^2 tan^2(pi alpha / 2))^(1 / (2 alpha))
  double exponent = 0.0;  // (1 - alpha) / alpha

  static StableCoeffs make(double alpha, double skew);
};

struct PhiloxKey {
  std::uint32_t k0 = 0;
  std::uint32_t k1 = 0;
};

/// Philox4x32-10 blocks for counters (block, stream) with block running from
/// `first_block` upward; each block yields two 64-bit words written in order.
/// `out.size()` must be even.
void philox_fill(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,
                 std::span<std::uint64_t> out);

/// Map 64-bit words to doubles in the open interval (0, 1).
void words_to_open_unit(std::span<const std::uint64_t> words, std::span<double> out);

/// out[i] = standard stable draw from uniforms (u_angle[i], u_exp[i]).
void stable_transform(const StableCoeffs& c, std::span<const double> u_angle,
                      std::span<const double> u_exp, std::span<double> out);

/// Box-Muller: two independent standard normals per uniform pair.
void box_muller(std::span<const double> u1, std::span<const double> u2,
                std::span<double> z1, std::span<double> z2);

/// out[i] = exp(x[i] - shift)
void exp_shifted(std::span<const double> x, double shift, std::span<double> out);

struct MinMax {
  double min;
  double max;
};

/// Componentwise min / max; the span must be non-empty.
MinMax minmax(std::span<const double> x);

// Vector math entry points used by the kernels, exposed for accuracy tests.
double exp(double x);
double log(double x);
void sincos(double x, double& s, double& c);

#define SLOWDRIFT_DECLARE_KERNELS                                                        \
  void philox_fill(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,       \
                   std::span<std::uint64_t> out);                                        \
  void words_to_open_unit(std::span<const std::uint64_t> words, std::span<double> out);  \
  void stable_transform(const StableCoeffs& c, std::span<const double> u_angle,          \
                        std::span<const double> u_exp, std::span<double> out);           \
  void box_muller(std::span<const double> u1, std::span<const double> u2,                \
                  std::span<double> z1, std::span<double> z2);                           \
  void exp_shifted(std::span<const double> x, double shift, std::span<double> out);      \
  MinMax minmax(std::span<const double> x);

namespace scalar {
SLOWDRIFT_DECLARE_KERNELS
}  // namespace scalar

namespace avx2 {
SLOWDRIFT_DECLARE_KERNELS
bool available();
}  // namespace avx2

#undef SLOWDRIFT_DECLARE_KERNELS

}  // namespace slowdrift::simd
