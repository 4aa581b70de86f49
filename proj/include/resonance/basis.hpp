#pragma once

#include "resonance/grid.hpp"

#include <limits>
#include <string>
#include <vector>

namespace resonance {

/// A rectangle family: I_n^k (axis-parallel intervals whose edge lengths take
/// at most k distinct values) or, for n = 2, all intervals rotated by gamma
/// about their own centre.
struct BasisSpec {
  enum class Kind { AxisIntervals, RotatedIntervals };

  Kind kind = Kind::AxisIntervals;
  int k = 2;
  double gamma = 0.0;

  static BasisSpec axis(int k) { return {Kind::AxisIntervals, k, 0.0}; }
  static BasisSpec rotated(double gamma) { return {Kind::RotatedIntervals, 2, gamma}; }

  bool is_rotated() const { return kind == Kind::RotatedIntervals; }
  /// Rotation is a multiple of a quarter turn (within 1e-12 rad).
  bool quarter_turn(int* turns = nullptr) const;
  std::string describe() const;
  bool operator==(const BasisSpec&) const = default;
};

inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

/// Cell-aligned shapes (widths in cells, 1 ≤ w_j ≤ N_j) admitted by the basis
/// with closed-rectangle diameter < r. Rotated bases admit every planar
/// shape; the rotation is applied by the evaluator. Sorted and duplicate-free.
/// Throws InvalidArgument if nothing is admissible.
std::vector<Coord> enumerate_shapes(const BasisSpec& basis, const DyadicGrid& grid, double r);

/// True if the physical edge lengths of `widths` on `grid` take at most k
/// distinct values (exact comparison).
bool edge_pattern_ok(const Coord& widths, const DyadicGrid& grid, int k);

/// diam² < r², exact; r may be +inf.
bool diameter_below(const Coord& widths, const DyadicGrid& grid, double r);

}  // namespace resonance
