#pragma once

#include "resonance/basis.hpp"
#include "resonance/grid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace resonance {

/// Cells of `grid` whose centres lie at distance < r_cells (cell units) from
/// the grid vertex `center` (cell units).
GridSet discrete_ball(const DyadicGrid& grid, const std::vector<std::int64_t>& center, double r_cells);

/// Cell offsets (relative to the ball centre vertex) of the planar discrete
/// ball; cell (i, j) covers [i, i+1) x [j, j+1).
std::vector<std::pair<std::int64_t, std::int64_t>> ball_cells(double r_cells);

/// Number of lattice cells x (unbounded plane) for which some cell-aligned
/// rectangle R containing x satisfies h |R ∩ S| > |R| and diam R < rho, all in
/// cell units. `mask` is S cropped to its bounding box (b0 x b1, row-major).
/// Exact: comparisons are done in rational arithmetic.
std::uint64_t strong_level_set_count(const std::vector<std::uint8_t>& mask, std::int64_t b0, std::int64_t b1,
                                     const Rational& h, double rho);

struct HaloProbe {
  BasisSpec basis = BasisSpec::axis(2);
  int n = 2;
  /// Amplitude, > 1.
  double h = 2.0;
  /// Grid exponent: cells have side 2^-grid_bits.
  int grid_bits = 10;
  /// Smallest admissible ball, in cells.
  std::size_t min_ball_cells = 4;
  /// Cap on window size (cells) for bases evaluated on a finite window.
  std::size_t window_cap = std::size_t{1} << 22;
};

struct HaloSample {
  double t = 0.0;
  /// Ball radius in cells.
  double r_cells = 0.0;
  std::uint64_t level_cells = 0;
  std::uint64_t ball_cells = 0;
  double ratio = 0.0;
};

struct HaloEstimate {
  double h = 0.0;
  bool weak_variant = false;
  std::vector<HaloSample> samples;
  double phi_hat = 0.0;
};

/// Max over the (t, r) lattice of |{M^{(tr)}(h chi_{V_r}) > 1}| / |V_r|; the
/// level set is counted on the whole lattice. `r_list` is in cells. The weak
/// variant replaces every t by h.
HaloEstimate halo_estimate(const HaloProbe& probe, const std::vector<double>& t_list,
                           const std::vector<double>& r_list, bool weak_variant = false);

/// min and max of phi / (h (1 + ln h)^exponent) over the samples.
std::pair<double, double> halo_fit(const std::vector<double>& h, const std::vector<double>& phi, int exponent);

/// Least-squares slope of ln(phi/h) against ln ln h.
double loglog_slope(const std::vector<double>& h, const std::vector<double>& phi);

void write_halo_csv(std::ostream& out, const HaloProbe& probe, const std::vector<HaloEstimate>& rows);
void write_halo_gnuplot(std::ostream& out, const std::vector<HaloEstimate>& rows);

}  // namespace resonance
