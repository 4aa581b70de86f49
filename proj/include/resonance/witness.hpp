#pragma once

#include "resonance/basis.hpp"
#include "resonance/grid.hpp"
#include "resonance/growth.hpp"
#include "resonance/integral_image.hpp"
#include "resonance/rotated.hpp"

#include <string>
#include <vector>

namespace resonance {

/// A cell of P together with a rectangle that contains it and over which the
/// average of h chi_E exceeds 1.
struct AxisCertificate {
  std::size_t cell = 0;
  AxisRect rect;
};

/// Same for rotated bases; the rectangle is in cell units.
struct RotatedCertificate {
  std::size_t cell = 0;
  RotatedRect rect;
};

struct WitnessLevelSet {
  BasisSpec basis;
  GridSet set;
  std::vector<AxisCertificate> axis;
  std::vector<RotatedCertificate> rotated;
  /// True if `set` is the exact level set (restricted to Q), false if it is a
  /// certified inner part.
  bool exact = true;
};

/// Finite instance of the M_Φ property for one (h, ε): E and per-basis P_B in
/// an enclosing interval Q, all on one template grid.
struct MPhiWitness {
  DyadicGrid grid;
  Rational h;
  /// ε of the property (physical).
  double eps = 0.0;
  /// Truncation used for the level sets (physical), at most eps.
  double truncation = 0.0;
  GridSet e;
  AxisRect q;
  std::vector<WitnessLevelSet> levels;
  /// Φ(h) as used for the mass condition.
  double phi_h = 0.0;
  /// Measured constants: c = min_B |P_B| / (Φ(h)|E|), c(h) = |E| / |Q|.
  double c = 0.0;
  Rational c_h;
  /// Reference value of c(h) from the ball construction, 0 if not applicable.
  double c_h_reference = 0.0;
  std::string source;

  const WitnessLevelSet& level(const BasisSpec& b) const;
};

/// Builds a witness with P_B = the level set of h chi_E under truncation
/// `truncation`, cut to Q. Axis and quarter-turn bases are exact; other
/// rotations use the certified inner level set. Throws InvalidArgument if a
/// precondition of the property fails (E outside Q, diam Q >= eps).
MPhiWitness build_witness(const GridSet& e, const AxisRect& q, const std::vector<BasisSpec>& bases, const Rational& h,
                          double eps, double truncation, const GrowthFunction& phi,
                          const RotatedSampling& sampling = {});

struct WitnessCheck {
  bool contained = false;
  bool common_resolution = false;
  bool mass = false;
  bool inside_q = false;
  bool small_q = false;
  bool density = false;
  std::string detail;
  bool ok() const { return contained && common_resolution && mass && inside_q && small_q && density; }
};

/// Exact re-check of the six conditions. `c` and `c_h` default to the
/// witness's measured constants when negative.
WitnessCheck verify_witness(const MPhiWitness& w, double c = -1.0, const Rational& c_h = Rational(-1));

/// Rechecks certificates against an arbitrary E: the rectangle contains the
/// cell, its diameter is below the physical truncation and h |R ∩ E| > |R|
/// (exactly for axis rectangles, with the fully-inside lower bound and
/// margin for rotated ones).
class CertificateChecker {
 public:
  CertificateChecker(const GridSet& e, const Rational& h, double truncation);
  bool operator()(const AxisCertificate& c) const;
  bool operator()(const RotatedCertificate& c) const;

 private:
  const GridSet& e_;
  Rational h_;
  double h_double_;
  double truncation_;
  double truncation_cells_;
  Rational truncation_sq_;
  /// Integer forms of the tests for square cells: sum of squared widths
  /// <= width_sq_limit_, h_num * count > h_den * area.
  bool integer_path_ = false;
  std::int64_t width_sq_limit_ = 0;
  std::int64_t h_num_ = 0;
  std::int64_t h_den_ = 1;
  IntegralImage<std::int32_t> counts_;
};

enum class WitnessMode {
  /// Level sets truncated at t r, contained in Q = (-r(1+t), r(1+t))^2.
  Faithful,
  /// Level sets truncated at ε and cut to Q.
  ClipToQ,
};

struct BallTemplate {
  /// Template grid carries 2^bits cells per axis over a square of side `side`.
  int bits = 3;
  double side = 1.0;
  /// Ball radius in cells.
  double r_cells = 2.0;
  double t = 1.0;
  WitnessMode mode = WitnessMode::ClipToQ;
};

/// E = discrete ball V_r at the template centre, Q = the centred cube of side
/// 2 r (1 + t), one level set per basis.
MPhiWitness ball_witness(const std::vector<BasisSpec>& bases, const Rational& h, double eps, const BallTemplate& tpl,
                         const GrowthFunction& phi, const RotatedSampling& sampling = {});

/// |E| / |Q| of the ball template.
Rational ball_density(const BallTemplate& tpl);

/// E = discrete ball V_r at the template centre, one level set per rotation
/// of I_2^2. Throws InfeasibleError (with the next resolution) if some
/// rotation keeps fewer than half the cells of the exact axis level set.
MPhiWitness mphi_witness_for_rotations(const std::vector<double>& gammas, const Rational& h, double eps,
                                       const BallTemplate& tpl, const GrowthFunction& phi,
                                       const RotatedSampling& sampling = {});

}  // namespace resonance
