#pragma once

#include "resonance/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace resonance {

using Coord = std::vector<std::int64_t>;

/// Uniform dyadic partition of an axis-parallel box. Axis j carries 2^m[j]
/// cells. Cells are stored row-major: the last axis varies fastest.
class DyadicGrid {
 public:
  DyadicGrid() = default;
  /// Unit cube (0,1)^n at resolution m.
  explicit DyadicGrid(std::vector<int> m);
  DyadicGrid(std::vector<int> m, std::vector<Rational> origin, std::vector<Rational> sides);

  /// Isotropic unit-cube grid with 2^bits cells per axis.
  static DyadicGrid cube(int n, int bits);

  int dim() const { return static_cast<int>(m_.size()); }
  const std::vector<int>& resolution() const { return m_; }
  const std::vector<Rational>& origin() const { return origin_; }
  const std::vector<Rational>& sides() const { return sides_; }

  std::int64_t cells_along(int axis) const { return counts_[axis]; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::size_t cell_count() const { return total_; }
  const std::vector<std::size_t>& strides() const { return strides_; }

  Rational cell_length(int axis) const;
  Rational cell_volume() const;
  Rational box_volume() const;
  bool is_unit_cube() const;

  std::size_t index(std::span<const std::int64_t> c) const;
  Coord coord(std::size_t index) const;
  bool in_range(std::span<const std::int64_t> c) const;

  /// Physical centre of a cell along one axis.
  Rational cell_center(int axis, std::int64_t i) const;

  /// Same box, finer (or equal) resolution.
  DyadicGrid refined(const std::vector<int>& m) const;

  bool operator==(const DyadicGrid& other) const;
  bool operator!=(const DyadicGrid& other) const { return !(*this == other); }

  std::string describe() const;

 private:
  void init();

  std::vector<int> m_;
  std::vector<Rational> origin_;
  std::vector<Rational> sides_;
  std::vector<std::int64_t> counts_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
};

/// Half-open per-axis cell ranges [lo, hi). Ranges may leave the grid; the
/// part outside contributes zero mass but full volume.
struct AxisRect {
  Coord lo;
  Coord hi;

  int dim() const { return static_cast<int>(lo.size()); }
  std::int64_t width(int axis) const { return hi[axis] - lo[axis]; }
  std::int64_t cell_count() const;
  bool contains(std::span<const std::int64_t> c) const;
  /// Squared Euclidean diameter in physical units of `grid`.
  Rational diameter_squared(const DyadicGrid& grid) const;
  AxisRect translated(std::span<const std::int64_t> offset) const;
  bool valid() const;
  bool operator==(const AxisRect&) const = default;
};

/// A union of grid cells, one bit per cell.
class GridSet {
 public:
  GridSet() = default;
  explicit GridSet(DyadicGrid grid, bool full = false);

  static GridSet from_cells(const DyadicGrid& grid, std::span<const std::size_t> cells);
  static GridSet from_rect(const DyadicGrid& grid, const AxisRect& rect);

  const DyadicGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.cell_count(); }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool on = true) {
    if (on)
      words_[i >> 6] |= (std::uint64_t{1} << (i & 63));
    else
      words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  Rational measure() const;
  /// measure / box volume.
  Rational normalized_measure() const;

  std::vector<std::size_t> cells() const;
  void for_each(const std::function<void(std::size_t)>& fn) const;

  /// Re-represents the set on a finer grid over the same box.
  GridSet refined(const DyadicGrid& finer) const;
  /// Cells of the coarser grid that are fully covered; throws if the set is
  /// not a union of coarse cells and `require_exact` is set.
  GridSet coarsened(const DyadicGrid& coarser, bool require_exact = true) const;

  bool subset_of(const GridSet& other) const;
  bool operator==(const GridSet& other) const;
  bool operator!=(const GridSet& other) const { return !(*this == other); }

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

 private:
  DyadicGrid grid_;
  std::vector<std::uint64_t> words_;
};

GridSet intersection(const GridSet& a, const GridSet& b);
GridSet set_union(const GridSet& a, const GridSet& b);
GridSet complement(const GridSet& a);
GridSet difference(const GridSet& a, const GridSet& b);
std::size_t intersection_count(const GridSet& a, const GridSet& b);

Rational measure(const GridSet& s);

/// True iff |s ∩ Q| = |s| |Q| (measures normalised to the box) for every
/// cell Q of the coarse resolution `coarse`.
bool uniform_distribution_check(const GridSet& s, const std::vector<int>& coarse);

enum class ValueMode { Rational, Double };

/// Nonnegative cell-constant function. Rational mode keeps exact values;
/// double mode keeps only the doubles.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(DyadicGrid grid, ValueMode mode);
  static StepFunction from_doubles(DyadicGrid grid, std::vector<double> values);
  static StepFunction from_rationals(DyadicGrid grid, std::vector<Rational> values);
  /// `amplitude` on `s`, zero elsewhere.
  static StepFunction indicator(const GridSet& s, const Rational& amplitude, ValueMode mode);

  const DyadicGrid& grid() const { return grid_; }
  ValueMode mode() const { return mode_; }
  std::size_t size() const { return grid_.cell_count(); }

  double value(std::size_t i) const { return doubles_[i]; }
  /// Exact value; in double mode this is the exact value of the stored double.
  Rational exact(std::size_t i) const;
  void set(std::size_t i, const Rational& v);
  void set(std::size_t i, double v);

  const std::vector<double>& doubles() const { return doubles_; }
  const std::vector<Rational>& rationals() const { return rationals_; }

  Rational integral() const;
  GridSet support() const;
  StepFunction scaled(const Rational& c) const;
  StepFunction refined(const DyadicGrid& finer) const;
  StepFunction with_mode(ValueMode mode) const;

 private:
  DyadicGrid grid_;
  ValueMode mode_ = ValueMode::Double;
  std::vector<double> doubles_;
  std::vector<Rational> rationals_;
};

/// Maps each cell of `fine` to its containing cell of `coarse` (same box).
std::size_t parent_cell(const DyadicGrid& fine, const DyadicGrid& coarse, std::size_t fine_index);

}  // namespace resonance
