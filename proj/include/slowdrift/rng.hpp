#pragma once

#include <cstdint>
#include <span>

#include "slowdrift/simd/kernels.hpp"

namespace slowdrift {

/// Counter-based random stream (Philox4x32-10). The key is the seed and the
/// upper counter half is the stream id, so distinct (seed, stream_id) pairs
/// address disjoint, independent sequences and any pair can be replayed.
///
/// Bulk fills produce exactly the values that repeated scalar calls would.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform();
  void fill_uniform(std::span<double> out);

  double normal();
  /// Standard normals via the Box-Muller kernel; does not touch the spare
  /// value cached by normal().
  void fill_normal(std::span<double> out);

  double exponential();

  /// Gamma(shape, 1), Marsaglia-Tsang.
  double gamma(double shape);

  /// Poisson count returned as a double so that means beyond the integer
  /// range are representable; means above 1e15 use the normal limit.
  double poisson(double mean);

 private:
  void fill_words(std::span<std::uint64_t> out);

  std::uint64_t seed_;
  std::uint64_t stream_;
  simd::PhiloxKey key_;
  std::uint64_t block_ = 0;
  std::uint64_t spare_word_ = 0;
  bool has_spare_word_ = false;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace slowdrift
