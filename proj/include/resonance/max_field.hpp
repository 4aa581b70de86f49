#pragma once

#include "resonance/basis.hpp"
#include "resonance/grid.hpp"

#include <string>
#include <vector>

namespace resonance {

/// Truncated maximal function sampled at cell centres.
///
/// Rational mode stores, per cell, the best rectangle sum `num` (in units of
/// 1/denominator) and its cell count `area`, reduced to lowest terms, so the
/// value is num / (denominator * area). Double mode stores only `values`.
struct MaxField {
  DyadicGrid grid;
  BasisSpec basis;
  double r = kNoTruncation;
  ValueMode mode = ValueMode::Double;
  bool wrap = false;
  /// True when the values are certified lower bounds (sampled rotations).
  bool lower_bound = false;

  std::vector<double> values;
  std::vector<std::int64_t> num;
  std::vector<std::int64_t> area;
  BigInt denominator = 1;

  Rational exact(std::size_t i) const;
  /// Metadata line for the text format.
  std::string metadata() const;
  StepFunction to_step_function() const;
};

struct MaxFieldOptions {
  /// Rectangles wrap around the box (torus) instead of zero extension.
  bool wrap = false;
};

/// Direct evaluation: for every cell and every admissible rectangle
/// containing its centre, the rectangle average.
MaxField max_field_brute(const StepFunction& f, const BasisSpec& basis, double r,
                         const MaxFieldOptions& opts = {});

/// Per-shape windowed sums followed by a separable running max.
MaxField max_field_fast(const StepFunction& f, const BasisSpec& basis, double r,
                        const MaxFieldOptions& opts = {});

/// Cells with value > lambda (strict, exact in rational mode).
GridSet level_set(const MaxField& field, const Rational& lambda);
GridSet level_set(const MaxField& field, double lambda);

bool fields_identical(const MaxField& a, const MaxField& b);

/// Quarter-turn rotation of cell coordinates on a square planar grid:
/// cell (i, j) moves to (j, N-1-i), applied `turns` times.
std::size_t rotate_cell(const DyadicGrid& grid, std::size_t index, int turns);
GridSet rotate_quarter(const GridSet& s, int turns);
StepFunction rotate_quarter(const StepFunction& f, int turns);

}  // namespace resonance
