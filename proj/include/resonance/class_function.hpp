#pragma once

#include "resonance/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace resonance {

/// Step function with few distinct values, stored as a class index per cell
/// and one exact value per class. Suited to fine grids where a Rational per
/// cell would not fit in memory.
struct ClassFunction {
  DyadicGrid grid;
  std::vector<Rational> values;
  std::vector<std::uint16_t> cls;

  ClassFunction() = default;
  /// All cells in class 0 with value `fill`.
  ClassFunction(DyadicGrid g, const Rational& fill);

  /// f read on a grid at least as fine as its own; classes are f's distinct
  /// values in increasing order.
  static ClassFunction from_step(const StepFunction& f, const DyadicGrid& finer);

  const Rational& value(std::size_t i) const { return values[cls[i]]; }
  /// Class holding `v`, appended if new.
  std::uint16_t class_of(const Rational& v);
  Rational integral() const;
  /// Cells per class.
  std::vector<std::uint64_t> histogram() const;
  /// Cells per distinct value, in increasing value order.
  std::vector<std::pair<Rational, std::uint64_t>> value_histogram() const;
  StepFunction to_step_function() const;
};

/// Same text format as write_step_function.
void write_class_function(std::ostream& out, const ClassFunction& f, const std::vector<std::string>& metadata = {});

}  // namespace resonance
