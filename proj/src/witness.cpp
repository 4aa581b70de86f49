#include "resonance/witness.hpp"

#include "resonance/errors.hpp"
#include "resonance/halo.hpp"
#include "resonance/max_field.hpp"

#include <cmath>
#include <limits>

namespace resonance {

namespace {

IntegralImage<std::int32_t> count_image(const GridSet& e) {
  std::vector<std::int32_t> v(e.size(), 0);
  e.for_each([&](std::size_t i) { v[i] = 1; });
  return IntegralImage<std::int32_t>(e.grid(), v);
}

double cell_side(const DyadicGrid& g) { return to_double(g.cell_length(0)); }

bool square_cells(const DyadicGrid& g) {
  for (int j = 1; j < g.dim(); ++j)
    if (g.cell_length(j) != g.cell_length(0)) return false;
  return true;
}

// Certificates for every cell of p from cell-aligned rectangles of the axis
// family I_n^k; p must lie inside the exact level set.
std::vector<AxisCertificate> axis_certificates(const GridSet& e, const GridSet& p, int k, const Rational& h,
                                               double truncation) {
  const DyadicGrid& g = e.grid();
  const int n = g.dim();
  auto counts = count_image(e);
  std::vector<std::int64_t> owner(p.size(), -1);
  std::vector<AxisCertificate> out;
  std::size_t missing = p.count();
  if (missing == 0) return out;

  for (const Coord& w : enumerate_shapes(BasisSpec::axis(k), g, truncation)) {
    std::int64_t area = 1;
    for (auto x : w) area *= x;
    Coord lo(n), hi(n);
    for (int j = 0; j < n; ++j) lo[j] = -w[j] + 1;
    // Odometer over lower corners.
    while (true) {
      for (int j = 0; j < n; ++j) hi[j] = lo[j] + w[j];
      const std::int64_t c = counts.sum(lo.data(), hi.data());
      if (c > 0 && h * c > Rational(area)) {
        AxisRect rect{lo, hi};
        Coord x(n), clo(n), chi(n);
        for (int j = 0; j < n; ++j) {
          clo[j] = std::max<std::int64_t>(lo[j], 0);
          chi[j] = std::min<std::int64_t>(hi[j], g.cells_along(j));
        }
        x = clo;
        while (true) {
          std::size_t idx = g.index(x);
          if (p.test(idx) && owner[idx] < 0) {
            owner[idx] = static_cast<std::int64_t>(out.size());
            out.push_back({idx, rect});
            --missing;
          }
          int j = n - 1;
          while (j >= 0 && ++x[j] == chi[j]) x[j] = clo[j], --j;
          if (j < 0) break;
        }
        if (missing == 0) return out;
      }
      int j = n - 1;
      while (j >= 0 && ++lo[j] == g.cells_along(j)) lo[j] = -w[j] + 1, --j;
      if (j < 0) break;
    }
  }
  throw VerificationError("level-set cell without an axis certificate");
}

}  // namespace

const WitnessLevelSet& MPhiWitness::level(const BasisSpec& b) const {
  for (const auto& l : levels)
    if (l.basis == b) return l;
  throw InvalidArgument("witness has no level set for " + b.describe());
}

CertificateChecker::CertificateChecker(const GridSet& e, const Rational& h, double truncation)
    : e_(e),
      h_(h),
      h_double_(to_double(h)),
      truncation_(truncation),
      truncation_cells_(truncation / cell_side(e.grid())),
      truncation_sq_(std::isinf(truncation) ? Rational(0) : rational_from_double(truncation) *
                                                                 rational_from_double(truncation)),
      counts_(count_image(e)) {
  const DyadicGrid& g = e.grid();
  const BigInt num = numerator(h), den = denominator(h);
  const BigInt cap = BigInt(1) << 40;
  if (square_cells(g) && num < cap && den < cap) {
    integer_path_ = true;
    h_num_ = static_cast<std::int64_t>(num);
    h_den_ = static_cast<std::int64_t>(den);
    if (std::isinf(truncation)) {
      width_sq_limit_ = std::numeric_limits<std::int64_t>::max();
    } else {
      const Rational cell = g.cell_length(0);
      const Rational t = truncation_sq_ / (cell * cell);
      BigInt ceil_t = numerator(t) / denominator(t);
      if (Rational(ceil_t) < t) ceil_t += 1;
      const BigInt lim = ceil_t - 1;
      width_sq_limit_ = lim > BigInt(std::int64_t{1} << 62) ? std::int64_t{1} << 62 : static_cast<std::int64_t>(lim);
    }
  }
}

bool CertificateChecker::operator()(const AxisCertificate& c) const {
  const DyadicGrid& g = e_.grid();
  if (c.cell >= g.cell_count() || c.rect.dim() != g.dim()) return false;
  if (!c.rect.contains(g.coord(c.cell))) return false;
  const std::int64_t count = counts_.sum(c.rect);
  if (integer_path_) {
    std::int64_t sq = 0;
    for (int a = 0; a < c.rect.dim(); ++a) sq += c.rect.width(a) * c.rect.width(a);
    if (sq > width_sq_limit_) return false;
    return static_cast<__int128>(h_num_) * count > static_cast<__int128>(h_den_) * c.rect.cell_count();
  }
  if (!std::isinf(truncation_) && !(c.rect.diameter_squared(g) < truncation_sq_)) return false;
  return h_ * count > Rational(c.rect.cell_count());
}

bool CertificateChecker::operator()(const RotatedCertificate& c) const {
  const DyadicGrid& g = e_.grid();
  if (g.dim() != 2 || c.cell >= g.cell_count()) return false;
  if (!(c.rect.diameter() < truncation_cells_ * (1 - kCertMargin))) return false;
  const Coord x = g.coord(c.cell);
  std::int64_t first, last;
  cells_inside_column(c.rect, x[0], first, last);
  if (!(first <= x[1] && x[1] < last)) return false;
  return certify_rotated(e_, h_double_, c.rect);
}

MPhiWitness build_witness(const GridSet& e, const AxisRect& q, const std::vector<BasisSpec>& bases, const Rational& h,
                          double eps, double truncation, const GrowthFunction& phi, const RotatedSampling& sampling) {
  const DyadicGrid& g = e.grid();
  if (!(h > 1)) throw InvalidArgument("witness needs h > 1");
  if (!(eps > 0) || !(truncation > 0) || truncation > eps) throw InvalidArgument("witness needs 0 < truncation <= eps");
  if (bases.empty()) throw InvalidArgument("witness needs at least one basis");
  if (e.empty()) throw InvalidArgument("witness needs a nonempty E");
  GridSet qset = GridSet::from_rect(g, q);
  if (!e.subset_of(qset)) throw InvalidArgument("E must lie inside Q");
  if (!(to_double(q.diameter_squared(g)) < eps * eps)) throw InvalidArgument("diam Q must be below eps");

  MPhiWitness w;
  w.grid = g;
  w.h = h;
  w.eps = eps;
  w.truncation = truncation;
  w.e = e;
  w.q = q;
  w.phi_h = phi(to_double(h));
  w.c_h = e.measure() / qset.measure();

  auto f = StepFunction::indicator(e, h, ValueMode::Rational);
  double cmin = std::numeric_limits<double>::infinity();
  for (const BasisSpec& b : bases) {
    WitnessLevelSet lv;
    lv.basis = b;
    int turns = 0;
    if (!b.is_rotated() || b.quarter_turn(&turns)) {
      if (b.is_rotated() && g.dim() != 2) throw InvalidArgument("rotated bases need n = 2");
      if (b.is_rotated() && !square_cells(g)) throw InvalidArgument("rotated bases need square cells");
      lv.set = intersection(level_set(max_field_fast(f, b, truncation), Rational(1)), qset);
      lv.axis = axis_certificates(e, lv.set, b.is_rotated() ? 2 : b.k, h, truncation);
      lv.exact = true;
    } else {
      if (g.dim() != 2) throw InvalidArgument("rotated bases need n = 2");
      auto rl = rotated_level_set(e, to_double(h), b.gamma, truncation / cell_side(g), sampling);
      lv.set = intersection(rl.set, qset);
      for (const auto& [cell, rect] : rl.certificates)
        if (lv.set.test(cell)) lv.rotated.push_back({cell, rect});
      lv.exact = false;
    }
    cmin = std::min(cmin, to_double(lv.set.measure()) / (w.phi_h * to_double(e.measure())));
    w.levels.push_back(std::move(lv));
  }
  w.c = cmin;
  return w;
}

WitnessCheck verify_witness(const MPhiWitness& w, double c, const Rational& c_h) {
  WitnessCheck out;
  const DyadicGrid& g = w.grid;
  const double creq = c < 0 ? w.c : c;
  const Rational chreq = c_h < 0 ? w.c_h : c_h;
  GridSet qset = GridSet::from_rect(g, w.q);

  out.contained = true;
  CertificateChecker check(w.e, w.h, w.truncation);
  auto f = StepFunction::indicator(w.e, w.h, ValueMode::Rational);
  for (const auto& lv : w.levels) {
    std::size_t certified = 0;
    GridSet seen(g);
    for (const auto& c2 : lv.axis) {
      if (!lv.set.test(c2.cell) || !check(c2)) out.contained = false;
      if (!seen.test(c2.cell)) seen.set(c2.cell), ++certified;
    }
    for (const auto& c2 : lv.rotated) {
      if (!lv.set.test(c2.cell) || !check(c2)) out.contained = false;
      if (!seen.test(c2.cell)) seen.set(c2.cell), ++certified;
    }
    if (certified != lv.set.count()) out.contained = false;
    int turns = 0;
    if (lv.exact && (!lv.basis.is_rotated() || lv.basis.quarter_turn(&turns))) {
      GridSet oracle = level_set(max_field_fast(f, lv.basis, w.truncation), Rational(1));
      if (!lv.set.subset_of(oracle)) out.contained = false;
    }
    if (!out.contained && out.detail.empty()) out.detail = "level set not certified for " + lv.basis.describe();
  }

  out.common_resolution = true;
  for (const auto& lv : w.levels)
    if (lv.set.grid() != g) out.common_resolution = false;
  if (w.e.grid() != g) out.common_resolution = false;

  out.mass = true;
  const double rhs = creq * w.phi_h * to_double(w.e.measure());
  for (const auto& lv : w.levels)
    if (to_double(lv.set.measure()) < rhs * (1 - 1e-12)) out.mass = false;

  out.inside_q = w.e.subset_of(qset);
  for (const auto& lv : w.levels)
    if (!lv.set.subset_of(qset)) out.inside_q = false;

  const Rational eps = rational_from_double(w.eps);
  out.small_q = w.q.diameter_squared(g) < eps * eps;
  out.density = w.e.measure() >= chreq * qset.measure();
  return out;
}

namespace {

struct BallGeometry {
  DyadicGrid grid;
  AxisRect q;
  GridSet e;
};

BallGeometry ball_geometry(const BallTemplate& tpl) {
  if (tpl.bits < 1 || !(tpl.side > 0) || !(tpl.r_cells > 0) || !(tpl.t > 0))
    throw InvalidArgument("invalid ball template");
  DyadicGrid g({tpl.bits, tpl.bits}, {Rational(0), Rational(0)},
               {rational_from_double(tpl.side), rational_from_double(tpl.side)});
  const std::int64_t N = g.cells_along(0);
  const double half = tpl.r_cells * (1 + tpl.t);
  if (half != std::floor(half) || 2 * half > static_cast<double>(N))
    throw InvalidArgument("r(1+t) must be a whole number of cells fitting the template");
  const std::int64_t hq = static_cast<std::int64_t>(half);
  AxisRect q{{N / 2 - hq, N / 2 - hq}, {N / 2 + hq, N / 2 + hq}};
  GridSet e = discrete_ball(g, {N / 2, N / 2}, tpl.r_cells);
  return {g, q, e};
}

}  // namespace

Rational ball_density(const BallTemplate& tpl) {
  auto geo = ball_geometry(tpl);
  return Rational(geo.e.count()) / Rational(geo.q.cell_count());
}

MPhiWitness ball_witness(const std::vector<BasisSpec>& bases, const Rational& h, double eps, const BallTemplate& tpl,
                         const GrowthFunction& phi, const RotatedSampling& sampling) {
  auto geo = ball_geometry(tpl);
  const double cell = cell_side(geo.grid);
  const double truncation = tpl.mode == WitnessMode::Faithful ? tpl.t * tpl.r_cells * cell : eps;
  MPhiWitness w = build_witness(geo.e, geo.q, bases, h, eps, truncation, phi, sampling);
  w.source = tpl.mode == WitnessMode::Faithful ? "ball-faithful" : "ball-clip";
  w.c_h_reference = 1.0 / (4.0 * 2.0 * std::pow(1 + tpl.t, 2));
  return w;
}

MPhiWitness mphi_witness_for_rotations(const std::vector<double>& gammas, const Rational& h, double eps,
                                       const BallTemplate& tpl, const GrowthFunction& phi,
                                       const RotatedSampling& sampling) {
  if (gammas.empty()) throw InvalidArgument("rotation sample is empty");
  std::vector<BasisSpec> bases;
  for (double gamma : gammas) bases.push_back(BasisSpec::rotated(gamma));
  MPhiWitness w = ball_witness(bases, h, eps, tpl, phi, sampling);

  // The exact axis level set under the same truncation stands in for |A_gamma|.
  auto f = StepFunction::indicator(w.e, h, ValueMode::Rational);
  const std::size_t axis =
      intersection(level_set(max_field_fast(f, BasisSpec::axis(2), w.truncation), Rational(1)),
                   GridSet::from_rect(w.grid, w.q))
          .count();
  for (const auto& lv : w.levels)
    if (2 * lv.set.count() < axis)
      throw InfeasibleError("rotation " + lv.basis.describe() + " keeps less than half of the level set", -1,
                            tpl.bits + 1);
  return w;
}

}  // namespace resonance
