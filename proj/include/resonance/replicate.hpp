#pragma once

#include "resonance/witness.hpp"

#include <vector>

namespace resonance {

/// A witness tiled over every cell of a dyadic resolution of the unit cube.
struct Replication {
  /// Unit cube at the fine resolution j.
  DyadicGrid grid;
  /// Tile resolution i and fine resolution j (bits per axis).
  int i = 0;
  int j = 0;
  /// Tile side and offset of Q inside a tile, in fine cells.
  std::int64_t tile = 1;
  Coord offset;
  GridSet e;
  std::vector<BasisSpec> bases;
  std::vector<GridSet> p;
  /// Truncation carried over from the witness (physical, fine grid).
  double truncation = 0.0;
};

/// Encloses Q in the concentric interval with |E'| = delta |I~|, rounds up to
/// the smallest dyadic interval, and copies the configuration into every
/// cell of resolution m. The witness cell side must equal the resulting fine
/// cell side. Throws InvalidArgument if delta is not in (0, c(h)] and
/// InfeasibleError if the fine resolution exceeds `max_bits`.
Replication replicate_configuration(const MPhiWitness& w, const Rational& delta, int m, int max_bits = 12);

/// Fine resolution the replication would need for this witness and delta.
int replication_bits(const MPhiWitness& w, const Rational& delta, int m);

/// Physical side of the witness template that replicate_configuration will
/// accept at coarse resolution m: the tile side is 2^-m.
Rational replication_template_side(const DyadicGrid& tpl, const AxisRect& q, const Rational& c_h,
                                   const Rational& delta, int m);

struct ReplicationCheck {
  bool measure_bounds = false;
  bool contained = false;
  bool resolution = false;
  bool mass = false;
  bool uniform = false;
  bool ok() const { return measure_bounds && contained && resolution && mass && uniform; }
};

/// Exact recheck of the five conclusions: delta/4^n <= |E| <= delta, every P_B
/// certified on the tiled E, j >= m, |P_B| >= c Φ(h)|E|, and uniform
/// distribution of every P_B (and E) at resolution m.
ReplicationCheck verify_replication(const Replication& rep, const MPhiWitness& w, const Rational& delta, int m);

struct SubsetProduct {
  std::vector<std::size_t> members;
  Rational intersection;
  Rational product;
  bool holds = false;
};

struct IndependenceReport {
  bool chained = true;
  std::vector<SubsetProduct> subsets;
  bool all_hold() const;
};

/// |∩ A| = ∏ |A| (normalised measures, exact) for every subset of size 2..s.
/// Sets must share one grid. If `coarse` and `fine` are given, also checks
/// m_k <= j_k <= m_{k+1}.
IndependenceReport check_independence(const std::vector<GridSet>& sets, std::size_t max_subset,
                                      const std::vector<int>& coarse = {}, const std::vector<int>& fine = {});

}  // namespace resonance
