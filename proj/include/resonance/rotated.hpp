#pragma once

#include "resonance/grid.hpp"
#include "resonance/max_field.hpp"

#include <cstdint>
#include <vector>

namespace resonance {

/// cos/sin with exact values at multiples of a quarter turn and of pi/4.
struct Rotation {
  double c = 1.0;
  double s = 0.0;
  static Rotation of(double gamma);
};

/// Rectangle with sides a (along the rotated first axis) and b, rotated by
/// gamma about its centre. Units are whatever the caller uses consistently.
struct RotatedRect {
  double cx = 0.0;
  double cy = 0.0;
  double a = 1.0;
  double b = 1.0;
  double gamma = 0.0;

  RotatedRect translated(double dx, double dy) const { return {cx + dx, cy + dy, a, b, gamma}; }
  double diameter() const;
  /// Closed y-interval of the vertical line at abscissa x inside the
  /// rectangle; returns false if the line misses it.
  bool line_interval(double x, double& lo, double& hi) const;
};

/// Area of the intersection of a rotated rectangle with an axis box.
double clipped_area(const RotatedRect& r, double x0, double y0, double x1, double y1);

/// Average of f over a rotated rectangle given in physical coordinates;
/// zero extension outside the box, full rectangle area in the denominator.
double rotated_average(const StepFunction& f, const RotatedRect& rect);

/// Candidate rectangles for sampled rotated bases, in cell units.
struct RotatedSampling {
  double side_step = 0.5;
  /// Sides are multiples of side_step up to this length, geometric beyond.
  double linear_limit = 16.0;
  double geometric_ratio = 1.25;
  double max_side = 64.0;
  double center_step = 0.5;
};

std::vector<double> sampled_sides(const RotatedSampling& s);

/// Margin applied to every floating-point comparison that certifies a
/// rotated lower bound.
inline constexpr double kCertMargin = 1e-9;

// Cell units: x is the axis-0 index, y the axis-1 index, so a column of
// fixed x is contiguous in memory.

/// Cells of the column band [x, x+1] lying fully inside r (cell units):
/// y in [first, last). Empty if first >= last.
void cells_inside_column(const RotatedRect& r, std::int64_t x, std::int64_t& first, std::int64_t& last);

struct RotatedLevelSet {
  /// Cells fully inside some certified rectangle.
  GridSet set;
  /// For each cell of `set` (in index order), the certifying rectangle in
  /// cell units.
  std::vector<std::pair<std::size_t, RotatedRect>> certificates;
};

/// Certified inner part of {M_{B(gamma)}^{(r)}(h chi_E) > 1} on a square-cell
/// planar grid. A rectangle R qualifies when h * (cells of E fully inside R)
/// exceeds |R| and diam R < r (r in cell units); every cell fully inside a
/// qualifying R is included. Only rectangles meeting the window
/// [0, N)^2 are sampled.
RotatedLevelSet rotated_level_set(const GridSet& e, double h, double gamma, double r_cells,
                                  const RotatedSampling& sampling = {});

/// Lower-bound field for a sampled rotated basis: each sampled rectangle R
/// (centres on the half-cell lattice inside the box) contributes the sum of
/// f over the cells fully inside R divided by |R| to every cell whose centre
/// lies in R. Physical truncation radius r.
MaxField rotated_max_field(const StepFunction& f, double gamma, double r, const RotatedSampling& sampling = {});

/// h * |R ∩ E| lower bound (fully-inside cells) > |R|, with margin.
bool certify_rotated(const GridSet& e, double h, const RotatedRect& r);

}  // namespace resonance
