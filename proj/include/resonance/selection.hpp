#pragma once

#include "resonance/grid.hpp"
#include "resonance/growth.hpp"

#include <functional>
#include <vector>

namespace resonance {

/// Points a = h_1 < ... < h_k = b with Φ(h_{j+1}-) - Φ(h_j+) <= eps. One-sided
/// limits are probed at 1e-12 relative offsets. Throws ConvergenceError if
/// more than `max_points` are needed.
std::vector<double> partition_increasing(const std::function<double(double)>& phi, double a, double b, double eps,
                                         std::size_t max_points = 1'000'000);

struct LevelPiece {
  GridSet set;
  Rational h;
};

struct SelectionOptions {
  /// Only values strictly above this are eligible (the previous band's top).
  Rational floor = Rational(0);
  /// Oscillation allowed within a sub-band, as a fraction of Φ(a / k).
  double band_tolerance = 0.25;
};

struct StageSelection {
  std::vector<LevelPiece> pieces;
  /// Smallest and largest value class taken into the band.
  Rational band_low;
  Rational band_high;
  /// Σ Φ(h_j / k) |A_j|.
  double mass = 0.0;
};

/// Measure cap for pieces as a function of h_j / k.
using SizeCap = std::function<double(double)>;

/// Band {a <= f <= b} above max(k, floor), grown one value class at a time
/// until Σ Φ(h_j/k)|A_j| reaches `target`; sub-bands from
/// partition_increasing, h_j the least value in each, pieces cut to
/// |A_j| <= α(h_j / k). Throws InfeasibleError when f runs out of mass.
StageSelection select_level_sets(const GrowthFunction& phi, const StepFunction& f, int k, const SizeCap& alpha,
                                 double target, const SelectionOptions& options = {});

struct LevelSelection {
  std::vector<GridSet> sets;
  std::vector<Rational> h;
  std::vector<int> q;
  /// Stage index that produced each entry.
  std::vector<int> stage;
  /// Σ Φ(h_j / q_j) |A_j| per stage.
  std::vector<double> stage_mass;

  std::size_t size() const { return sets.size(); }
};

/// Stages i = 1..K of select_level_sets with k = i, target τ i, each band
/// strictly above the previous one. InfeasibleError carries the largest
/// depth that succeeded.
LevelSelection build_divergent_sequences(const GrowthFunction& phi, const StepFunction& f, const SizeCap& alpha,
                                         int depth, double target_scale = 1.0);

struct SelectionCheck {
  bool disjoint = false;
  bool amplitudes = false;
  bool q_nondecreasing = false;
  bool q_strictly_increasing = false;
  bool caps = false;
  bool ok() const { return disjoint && amplitudes && q_nondecreasing && caps; }
};

/// Exact re-check of the LevelSelection invariants against f.
SelectionCheck check_selection(const LevelSelection& sel, const StepFunction& f, const SizeCap& alpha);

}  // namespace resonance
