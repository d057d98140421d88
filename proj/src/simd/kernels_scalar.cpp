#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "slowdrift/simd/kernels.hpp"

namespace slowdrift::simd::scalar {
namespace detail {

using V = double;
using M = bool;

inline V splat(double x) { return x; }
inline V vfma(V a, V b, V c) { return std::fma(a, b, c); }
inline V vround(V x) { return std::nearbyint(x); }
inline V vfloor(V x) { return std::floor(x); }
inline V vsqrt(V x) { return std::sqrt(x); }
// Operand order mirrors vminpd / vmaxpd: the second operand wins on NaN.
inline V vmin(V a, V b) { return a < b ? a : b; }
inline V vmax(V a, V b) { return a > b ? a : b; }
inline M lt(V a, V b) { return a < b; }
inline M gt(V a, V b) { return a > b; }
inline M eq(V a, V b) { return a == b; }
inline M is_nan(V a) { return a != a; }
inline M mask_or(M a, M b) { return a || b; }
inline V select(M m, V a, V b) { return m ? a : b; }

inline V pow2i(V n) {
  const auto k = static_cast<std::int64_t>(n);
  return std::bit_cast<double>(static_cast<std::uint64_t>(k + 1023) << 52);
}

inline void decompose(V x, V& mantissa, V& exponent) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  const auto biased = static_cast<std::int64_t>(bits >> 52);
  exponent = static_cast<double>(biased - 1023);
  mantissa = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
}

#include "vecmath_impl.inc"

inline void philox_block(std::uint32_t k0, std::uint32_t k1, std::uint32_t c[4]) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c[1] ^ k0;
    const std::uint32_t n2 = hi0 ^ c[3] ^ k1;
    c[0] = n0;
    c[1] = lo1;
    c[2] = n2;
    c[3] = lo0;
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
  }
}

}  // namespace detail

void philox_fill(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,
                 std::span<std::uint64_t> out) {
  if (out.size() % 2 != 0) {
    throw std::invalid_argument("philox_fill: output size must be even");
  }
  for (std::size_t i = 0; i < out.size(); i += 2) {
    const std::uint64_t block = first_block + i / 2;
    std::uint32_t c[4] = {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    detail::philox_block(key.k0, key.k1, c);
    out[i] = std::uint64_t{c[0]} | (std::uint64_t{c[1]} << 32);
    out[i + 1] = std::uint64_t{c[2]} | (std::uint64_t{c[3]} << 32);
  }
}

void words_to_open_unit(std::span<const std::uint64_t> words, std::span<double> out) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    out[i] = (static_cast<double>(words[i] >> 12) + 0.5) * 0x1.0p-52;
  }
}

void stable_transform(const StableCoeffs& c, std::span<const double> u_angle,
                      std::span<const double> u_exp, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = detail::stable_v(u_angle[i], u_exp[i], c.alpha, c.inv_alpha, c.shift, c.factor,
                              c.exponent);
  }
}

void box_muller(std::span<const double> u1, std::span<const double> u2, std::span<double> z1,
                std::span<double> z2) {
  for (std::size_t i = 0; i < u1.size(); ++i) {
    detail::box_muller_v(u1[i], u2[i], z1[i], z2[i]);
  }
}

void exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = detail::exp_v(x[i] - shift);
  }
}

MinMax minmax(std::span<const double> x) {
  MinMax r{x[0], x[0]};
  for (double v : x) {
    r.min = detail::vmin(v, r.min);
    r.max = detail::vmax(v, r.max);
  }
  return r;
}

}  // namespace slowdrift::simd::scalar

namespace slowdrift::simd {

double exp(double x) { return scalar::detail::exp_v(x); }
double log(double x) { return scalar::detail::log_v(x); }
void sincos(double x, double& s, double& c) { scalar::detail::sincos_v(x, s, c); }

}  // namespace slowdrift::simd
