#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "slowdrift/path.hpp"
#include "slowdrift/stable.hpp"

namespace slowdrift {

/// V_x = S_x - delta x on the grid; jumps are unchanged.
LevyPathGrid potential_path(const LevyPathGrid& stable_path, double delta);

/// V_{-y} = -S'_y + delta y from the output of negative_side_path.
LevyPathGrid negative_potential_path(const LevyPathGrid& mirrored_path, double delta);

/// A(x) = int_0^x exp(V_y) dy tabulated at the segment boundaries of the
/// potential, where V is piecewise constant with left (cadlag) values.
struct ScaleFunction {
  std::vector<double> positions;  // strictly increasing, positions[0] = 0
  std::vector<double> log_a;      // log A(positions[k]); log_a[0] = -inf
  std::vector<double> a_values;   // A(positions[k]); +inf where it overflows
  /// log of the contribution exp(V) * width of segment k.
  std::vector<double> log_increments;
  /// Segments whose contribution is not representable as a double.
  std::vector<std::size_t> overflow_cells;

  std::size_t size() const { return positions.size(); }
  double log_total() const { return log_a.back(); }
  double end() const { return positions.back(); }
};

ScaleFunction scale_function(const LevyPathGrid& potential);
ScaleFunction scale_function(const Segments& potential_segments);

/// Raised by scale_inverse for a level outside [0, A(end)].
class ScaleRangeError : public std::out_of_range {
 public:
  ScaleRangeError(const std::string& what, bool above) : std::out_of_range(what), above_(above) {}
  /// True if the level exceeds A at the end of the tabulated range.
  bool above() const { return above_; }

 private:
  bool above_;
};

/// x with A(x) = a; exact inside a segment since A is linear there.
double scale_inverse(const ScaleFunction& sf, double a);
double scale_inverse_log(const ScaleFunction& sf, double log_a);

/// Depth beyond which the negative-side integral of exp(-V) is neglected:
/// max(10, ln(1 / (tol delta')) / delta') with delta' = delta / 2.
double negative_truncation_depth(const StablePotentialParams& params, double tol);

}  // namespace slowdrift
