// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <cstdint>
#include <stdexcept>

#include "slowdrift/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace slowdrift::simd::avx2 {
namespace detail {

struct V {
  __m256d v;
};
struct M {
  __m256d m;
};

inline V splat(double x) { return {_mm256_set1_pd(x)}; }
inline V operator+(V a, V b) { return {_mm256_add_pd(a.v, b.v)}; }
inline V operator-(V a, V b) { return {_mm256_sub_pd(a.v, b.v)}; }
inline V operator*(V a, V b) { return {_mm256_mul_pd(a.v, b.v)}; }
inline V operator/(V a, V b) { return {_mm256_div_pd(a.v, b.v)}; }
inline V operator-(V a) { return {_mm256_xor_pd(a.v, _mm256_set1_pd(-0.0))}; }
inline V vfma(V a, V b, V c) { return {_mm256_fmadd_pd(a.v, b.v, c.v)}; }
inline V vround(V x) { return {_mm256_round_pd(x.v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC)}; }
inline V vfloor(V x) { return {_mm256_floor_pd(x.v)}; }
inline V vsqrt(V x) { return {_mm256_sqrt_pd(x.v)}; }
inline V vmin(V a, V b) { return {_mm256_min_pd(a.v, b.v)}; }
inline V vmax(V a, V b) { return {_mm256_max_pd(a.v, b.v)}; }
inline M lt(V a, V b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ)}; }
inline M gt(V a, V b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ)}; }
inline M eq(V a, V b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_EQ_OQ)}; }
inline M is_nan(V a) { return {_mm256_cmp_pd(a.v, a.v, _CMP_UNORD_Q)}; }
inline M mask_or(M a, M b) { return {_mm256_or_pd(a.m, b.m)}; }
inline V select(M m, V a, V b) { return {_mm256_blendv_pd(b.v, a.v, m.m)}; }

// Integer-valued doubles with |n| < 2^51 <-> int64 lanes via the 1.5 * 2^52 bias.
inline __m256i to_int64(V n) {
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n.v, magic)),
                          _mm256_castpd_si256(magic));
}
inline V from_int64(__m256i k) {
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  return {_mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(k, _mm256_castpd_si256(magic))),
                        magic)};
}

inline V pow2i(V n) {
  const __m256i k = _mm256_add_epi64(to_int64(n), _mm256_set1_epi64x(1023));
  return {_mm256_castsi256_pd(_mm256_slli_epi64(k, 52))};
}

inline void decompose(V x, V& mantissa, V& exponent) {
  const __m256i bits = _mm256_castpd_si256(x.v);
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  exponent = from_int64(_mm256_sub_epi64(biased, _mm256_set1_epi64x(1023)));
  const __m256i mant = _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                                       _mm256_set1_epi64x(0x3FF0000000000000ll));
  mantissa = {_mm256_castsi256_pd(mant)};
}

inline V load(const double* p) { return {_mm256_loadu_pd(p)}; }
inline void store(double* p, V x) { _mm256_storeu_pd(p, x.v); }

#include "vecmath_impl.inc"

// Four Philox4x32-10 blocks at once; each 64-bit lane carries one 32-bit word.
inline void philox_x4(std::uint32_t k0, std::uint32_t k1, __m256i& c0, __m256i& c1, __m256i& c2,
                      __m256i& c3) {
  const __m256i m0 = _mm256_set1_epi64x(0xD2511F53ll);
  const __m256i m1 = _mm256_set1_epi64x(0xCD9E8D57ll);
  const __m256i lo_mask = _mm256_set1_epi64x(0xFFFFFFFFll);
  for (int round = 0; round < 10; ++round) {
    const __m256i p0 = _mm256_mul_epu32(c0, m0);
    const __m256i p1 = _mm256_mul_epu32(c2, m1);
    const __m256i key0 = _mm256_set1_epi64x(k0);
    const __m256i key1 = _mm256_set1_epi64x(k1);
    const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c1), key0);
    const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c3), key1);
    c1 = _mm256_and_si256(p1, lo_mask);
    c3 = _mm256_and_si256(p0, lo_mask);
    c0 = n0;
    c2 = n2;
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
  }
}

}  // namespace detail

bool available() { return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"); }

void philox_fill(PhiloxKey key, std::uint64_t stream, std::uint64_t first_block,
                 std::span<std::uint64_t> out) {
  if (out.size() % 2 != 0) {
    throw std::invalid_argument("philox_fill: output size must be even");
  }
  const std::size_t blocks = out.size() / 2;
  const __m256i lo_mask = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i s_lo = _mm256_set1_epi64x(static_cast<std::uint32_t>(stream));
  const __m256i s_hi = _mm256_set1_epi64x(static_cast<std::uint32_t>(stream >> 32));
  std::size_t b = 0;
  for (; b + 4 <= blocks; b += 4) {
    const std::uint64_t base = first_block + b;
    const __m256i ctr = _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(base)),
                                         _mm256_set_epi64x(3, 2, 1, 0));
    __m256i c0 = _mm256_and_si256(ctr, lo_mask);
    __m256i c1 = _mm256_srli_epi64(ctr, 32);
    __m256i c2 = s_lo;
    __m256i c3 = s_hi;
    detail::philox_x4(key.k0, key.k1, c0, c1, c2, c3);
    const __m256i w0 = _mm256_or_si256(c0, _mm256_slli_epi64(c1, 32));
    const __m256i w1 = _mm256_or_si256(c2, _mm256_slli_epi64(c3, 32));
    // Interleave so block j contributes out[2j], out[2j + 1].
    const __m256i lo = _mm256_unpacklo_epi64(w0, w1);  // b0w0 b0w1 | b2w0 b2w1
    const __m256i hi = _mm256_unpackhi_epi64(w0, w1);  // b1w0 b1w1 | b3w0 b3w1
    const __m256i first = _mm256_permute2x128_si256(lo, hi, 0x20);
    const __m256i second = _mm256_permute2x128_si256(lo, hi, 0x31);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + 2 * b), first);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + 2 * b + 4), second);
  }
  if (b < blocks) {
    scalar::philox_fill(key, stream, first_block + b, out.subspan(2 * b));
  }
}

void words_to_open_unit(std::span<const std::uint64_t> words, std::span<double> out) {
  // (w >> 12) < 2^52 converts exactly through the 2^52 exponent bias.
  std::size_t i = 0;
  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  const __m256i two52_bits = _mm256_castpd_si256(two52);
  for (; i + 4 <= words.size(); i += 4) {
    const __m256i w = _mm256_srli_epi64(
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words.data() + i)), 12);
    const __m256d value = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(w, two52_bits)), two52);
    const __m256d u =
        _mm256_mul_pd(_mm256_add_pd(value, _mm256_set1_pd(0.5)), _mm256_set1_pd(0x1.0p-52));
    _mm256_storeu_pd(out.data() + i, u);
  }
  scalar::words_to_open_unit(words.subspan(i), out.subspan(i));
}

void stable_transform(const StableCoeffs& c, std::span<const double> u_angle,
                      std::span<const double> u_exp, std::span<double> out) {
  using detail::splat;
  const auto alpha = splat(c.alpha);
  const auto inv_alpha = splat(c.inv_alpha);
  const auto shift = splat(c.shift);
  const auto factor = splat(c.factor);
  const auto exponent = splat(c.exponent);
  std::size_t i = 0;
  for (; i + 4 <= out.size(); i += 4) {
    const auto x = detail::stable_v(detail::load(u_angle.data() + i), detail::load(u_exp.data() + i),
                                    alpha, inv_alpha, shift, factor, exponent);
    detail::store(out.data() + i, x);
  }
  scalar::stable_transform(c, u_angle.subspan(i), u_exp.subspan(i), out.subspan(i));
}

void box_muller(std::span<const double> u1, std::span<const double> u2, std::span<double> z1,
                std::span<double> z2) {
  std::size_t i = 0;
  for (; i + 4 <= u1.size(); i += 4) {
    detail::V a, b;
    detail::box_muller_v(detail::load(u1.data() + i), detail::load(u2.data() + i), a, b);
    detail::store(z1.data() + i, a);
    detail::store(z2.data() + i, b);
  }
  scalar::box_muller(u1.subspan(i), u2.subspan(i), z1.subspan(i), z2.subspan(i));
}

void exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  std::size_t i = 0;
  const auto s = detail::splat(shift);
  for (; i + 4 <= x.size(); i += 4) {
    detail::store(out.data() + i, detail::exp_v(detail::load(x.data() + i) - s));
  }
  scalar::exp_shifted(x.subspan(i), shift, out.subspan(i));
}

MinMax minmax(std::span<const double> x) {
  if (x.size() < 8) {
    return scalar::minmax(x);
  }
  __m256d lo = _mm256_loadu_pd(x.data());
  __m256d hi = lo;
  std::size_t i = 4;
  for (; i + 4 <= x.size(); i += 4) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    lo = _mm256_min_pd(v, lo);
    hi = _mm256_max_pd(v, hi);
  }
  alignas(32) double l[4], h[4];
  _mm256_store_pd(l, lo);
  _mm256_store_pd(h, hi);
  MinMax r{l[0], h[0]};
  for (int k = 1; k < 4; ++k) {
    r.min = l[k] < r.min ? l[k] : r.min;
    r.max = h[k] > r.max ? h[k] : r.max;
  }
  for (; i < x.size(); ++i) {
    r.min = x[i] < r.min ? x[i] : r.min;
    r.max = x[i] > r.max ? x[i] : r.max;
  }
  return r;
}

}  // namespace slowdrift::simd::avx2

#else

namespace slowdrift::simd::avx2 {

bool available() { return false; }

namespace {
[[noreturn]] void unavailable() { throw std::runtime_error("AVX2 kernels not compiled in"); }
}  // namespace

void philox_fill(PhiloxKey, std::uint64_t, std::uint64_t, std::span<std::uint64_t>) { unavailable(); }
void words_to_open_unit(std::span<const std::uint64_t>, std::span<double>) { unavailable(); }
void stable_transform(const StableCoeffs&, std::span<const double>, std::span<const double>,
                      std::span<double>) {
  unavailable();
}
void box_muller(std::span<const double>, std::span<const double>, std::span<double>,
                std::span<double>) {
  unavailable();
}
void exp_shifted(std::span<const double>, double, std::span<double>) { unavailable(); }
MinMax minmax(std::span<const double>) { unavailable(); }

}  // namespace slowdrift::simd::avx2

#endif
