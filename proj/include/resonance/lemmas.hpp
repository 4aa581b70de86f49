#pragma once

#include "resonance/grid.hpp"

#include <vector>

namespace resonance {

/// ∫_E dx / (x_1 ... x_n) over E = {x_j > delta_j, x_1...x_n < h delta_1...delta_n},
/// by nested adaptive Gauss-Kronrod quadrature in the original coordinates.
/// Throws ConvergenceError if a level misses `tol` (relative).
double lemma9_integral(int n, const std::vector<double>& delta, double h, double tol = 1e-11);

/// (ln h)^n / n!.
double lemma9_closed_form(int n, double h);

struct Lemma10Result {
  /// Measure of {M_{I_n^k}(h chi_I) > 1}.
  Rational measure;
  /// measure / (h (ln h)^k |I|) and measure / (h (ln h)^{k-1} |I|).
  double ratio_k = 0.0;
  double ratio_k_minus_1 = 0.0;
  /// measure / (h (1 + ln h)^{k-1} |I|).
  double ratio_model = 0.0;
  /// Measure of the explicit region E of points whose hull with I qualifies.
  double region_measure = 0.0;
  /// True if the level set was counted on the unbounded lattice.
  bool lattice = false;
};

/// |E| / |I| for the explicit region, as a one-dimensional integral.
double lemma10_region_ratio(int n, int k, double h);

/// Level set of h chi_I for the basis I_n^k. The edge lengths of I along
/// axes k..n (1-based) must agree; h > 2^n. For n = 2, k = 2 the level set is
/// counted exactly on the unbounded cell lattice; otherwise on `grid`, which
/// must contain the translate of I's corner box scaled by h.
Lemma10Result lemma10_levelset_measure(const AxisRect& interval, double h, int k, const DyadicGrid& grid);

struct Lemma10Fit {
  /// Least-squares slope of ln(measure / (h |I|)) against ln ln h.
  double slope = 0.0;
  /// Whichever of k and k - 1 lies closer to the slope.
  int exponent = 0;
};

/// Sweeps h and fits the log exponent of the level-set measure.
Lemma10Fit lemma10_fit(const AxisRect& interval, const std::vector<double>& hs, int k, const DyadicGrid& grid);

}  // namespace resonance
