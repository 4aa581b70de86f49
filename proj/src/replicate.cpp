#include "resonance/replicate.hpp"

#include "resonance/errors.hpp"

#include <cmath>

namespace resonance {

namespace {

std::int64_t q_side(const AxisRect& q) {
  for (int a = 1; a < q.dim(); ++a)
    if (q.width(a) != q.width(0)) throw InvalidArgument("Q must be a cube");
  return q.width(0);
}

// Smallest power of two L with L^n >= cells / delta.
int tile_bits(std::size_t e_cells, const Rational& delta, int n) {
  const Rational need = Rational(e_cells) / delta;
  for (int b = 0; b < 62; ++b) {
    Rational vol = pow2(b * n);
    if (vol >= need) return b;
  }
  throw InfeasibleError("tile size overflow");
}

}  // namespace

int replication_bits(const MPhiWitness& w, const Rational& delta, int m) {
  if (!(delta > 0) || delta > w.c_h) throw InvalidArgument("delta must lie in (0, c(h)]");
  return m + tile_bits(w.e.count(), delta, w.grid.dim());
}

Rational replication_template_side(const DyadicGrid& tpl, const AxisRect& q, const Rational& c_h,
                                   const Rational& delta, int m) {
  const int n = tpl.dim();
  const std::int64_t s = q_side(q);
  std::int64_t cells = 1;
  for (int a = 0; a < n; ++a) cells *= s;
  // |E| in template cells is c(h) |Q|.
  Rational e_cells = c_h * cells;
  Rational need = e_cells / delta;
  int b = 0;
  while (pow2(b * n) < need) ++b;
  return Rational(tpl.cells_along(0)) / pow2(m + b);
}

Replication replicate_configuration(const MPhiWitness& w, const Rational& delta, int m, int max_bits) {
  const int n = w.grid.dim();
  if (m < 0) throw InvalidArgument("coarse resolution must be >= 0");
  const std::int64_t s = q_side(w.q);
  const int j = replication_bits(w, delta, m);
  const int lb = j - m;
  if (j > max_bits) throw InfeasibleError("replication needs a finer grid than the cap", -1, j);
  const std::int64_t L = std::int64_t{1} << lb;
  for (int a = 0; a < n; ++a)
    if (w.grid.cell_length(a) != pow2(-j) * 1)
      throw InvalidArgument("witness cell side does not match the tile resolution");

  Replication rep;
  rep.grid = DyadicGrid::cube(n, j);
  rep.i = m;
  rep.j = j;
  rep.tile = L;
  rep.offset.assign(n, (L - s) / 2);
  rep.e = GridSet(rep.grid);
  rep.truncation = w.truncation;
  for (const auto& lv : w.levels) {
    rep.bases.push_back(lv.basis);
    rep.p.emplace_back(rep.grid);
  }

  // Template cells of Q shifted into tile coordinates.
  Coord shift(n);
  for (int a = 0; a < n; ++a) shift[a] = rep.offset[a] - w.q.lo[a];
  auto tile_cells = [&](const GridSet& src) {
    std::vector<Coord> out;
    src.for_each([&](std::size_t idx) {
      Coord c = w.grid.coord(idx);
      for (int a = 0; a < n; ++a) c[a] += shift[a];
      out.push_back(std::move(c));
    });
    return out;
  };
  auto stamp = [&](const std::vector<Coord>& cells, GridSet& dst) {
    const std::int64_t tiles = std::int64_t{1} << m;
    Coord t(n, 0), x(n);
    while (true) {
      for (const Coord& c : cells) {
        for (int a = 0; a < n; ++a) x[a] = t[a] * L + c[a];
        dst.set(rep.grid.index(x));
      }
      int a = n - 1;
      while (a >= 0 && ++t[a] == tiles) t[a] = 0, --a;
      if (a < 0) break;
    }
  };
  stamp(tile_cells(w.e), rep.e);
  for (std::size_t b = 0; b < w.levels.size(); ++b) stamp(tile_cells(w.levels[b].set), rep.p[b]);
  return rep;
}

ReplicationCheck verify_replication(const Replication& rep, const MPhiWitness& w, const Rational& delta, int m) {
  ReplicationCheck out;
  const int n = rep.grid.dim();
  const Rational me = rep.e.measure();
  out.measure_bounds = me <= delta && me >= delta / pow2(2 * n);
  out.resolution = rep.j >= m && rep.i >= m;

  const std::vector<int> coarse(n, m);
  out.uniform = uniform_distribution_check(rep.e, coarse);
  out.mass = true;
  const double rhs = w.c * w.phi_h * to_double(me);
  for (const auto& p : rep.p) {
    if (!uniform_distribution_check(p, coarse)) out.uniform = false;
    if (to_double(p.measure()) < rhs * (1 - 1e-12)) out.mass = false;
  }

  // Every template certificate, translated into every tile, must hold on the
  // tiled E; together they cover every cell of every P_B.
  out.contained = true;
  CertificateChecker check(rep.e, w.h, rep.truncation);
  Coord shift(n);
  for (int a = 0; a < n; ++a) shift[a] = rep.offset[a] - w.q.lo[a];
  const std::int64_t tiles = std::int64_t{1} << m;
  for (std::size_t b = 0; b < w.levels.size() && out.contained; ++b) {
    const auto& lv = w.levels[b];
    GridSet covered(rep.grid);
    Coord t(n, 0);
    while (out.contained) {
      Coord d(n);
      for (int a = 0; a < n; ++a) d[a] = t[a] * rep.tile + shift[a];
      for (const auto& c : lv.axis) {
        Coord x = w.grid.coord(c.cell);
        for (int a = 0; a < n; ++a) x[a] += d[a];
        AxisCertificate moved{rep.grid.index(x), c.rect.translated(d)};
        if (!check(moved)) {
          out.contained = false;
          break;
        }
        covered.set(moved.cell);
      }
      for (const auto& c : lv.rotated) {
        Coord x = w.grid.coord(c.cell);
        for (int a = 0; a < n; ++a) x[a] += d[a];
        RotatedCertificate moved{rep.grid.index(x),
                                 c.rect.translated(static_cast<double>(d[0]), static_cast<double>(d[1]))};
        if (!check(moved)) {
          out.contained = false;
          break;
        }
        covered.set(moved.cell);
      }
      int a = n - 1;
      while (a >= 0 && ++t[a] == tiles) t[a] = 0, --a;
      if (a < 0) break;
    }
    if (!rep.p[b].subset_of(covered)) out.contained = false;
  }
  return out;
}

bool IndependenceReport::all_hold() const {
  if (!chained) return false;
  for (const auto& s : subsets)
    if (!s.holds) return false;
  return true;
}

IndependenceReport check_independence(const std::vector<GridSet>& sets, std::size_t max_subset,
                                      const std::vector<int>& coarse, const std::vector<int>& fine) {
  IndependenceReport rep;
  for (std::size_t k = 1; k < sets.size(); ++k)
    if (sets[k].grid() != sets[0].grid()) throw InvalidArgument("independence check needs one common grid");
  if (!coarse.empty() || !fine.empty()) {
    if (coarse.size() != sets.size() || fine.size() != sets.size())
      throw InvalidArgument("need one coarse and one fine resolution per set");
    for (std::size_t k = 0; k < sets.size(); ++k) {
      if (coarse[k] > fine[k]) rep.chained = false;
      if (k + 1 < sets.size() && fine[k] > coarse[k + 1]) rep.chained = false;
    }
  }
  const std::size_t K = sets.size();
  std::vector<Rational> mass;
  for (const auto& s : sets) mass.push_back(s.normalized_measure());
  if (K == 0) return rep;
  const Rational box = sets[0].grid().box_volume();

  // Subsets in lexicographic order of their members.
  std::vector<std::size_t> members;
  std::function<void(std::size_t, const GridSet*)> rec = [&](std::size_t start, const GridSet* acc) {
    for (std::size_t k = start; k < K; ++k) {
      members.push_back(k);
      GridSet inter = acc ? intersection(*acc, sets[k]) : sets[k];
      if (members.size() >= 2) {
        SubsetProduct sp;
        sp.members = members;
        sp.intersection = inter.measure() / box;
        sp.product = Rational(1);
        for (auto i : members) sp.product *= mass[i];
        sp.holds = sp.intersection == sp.product;
        rep.subsets.push_back(std::move(sp));
      }
      if (members.size() < max_subset) rec(k + 1, &inter);
      members.pop_back();
    }
  };
  rec(0, nullptr);
  return rep;
}

}  // namespace resonance
