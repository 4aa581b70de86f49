#include "resonance/rearrangement.hpp"

#include "resonance/errors.hpp"
#include "resonance/serialize.hpp"

#include <limits>
#include <ostream>
#include <sstream>

namespace resonance {

std::vector<std::uint32_t> Rearrangement::inverse() const {
  std::vector<std::uint32_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<std::uint32_t>(i);
  return inv;
}

Rearrangement build_rearrangement(const ResonancePlan& plan) {
  const DyadicGrid& grid = plan.grid;
  const std::size_t N = grid.cell_count();
  if (N > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("grid too large for a cell permutation");
  const std::size_t K = plan.stages.size();

  // E'_k and A'_k on the plan grid.
  std::vector<GridSet> e_prime(K), a_prime(K);
  GridSet later(grid);
  for (std::size_t k = K; k-- > 0;) {
    e_prime[k] = difference(plan.stages[k].e, later);
    later = set_union(later, plan.stages[k].e);
  }
  Rearrangement r;
  r.grid = grid;
  r.perm.assign(N, 0);
  std::vector<std::uint8_t> assigned(N, 0), taken(N, 0);
  for (std::size_t k = 0; k < K; ++k) {
    GridSet a = plan.selection.sets[k].refined(grid);
    const std::size_t need = e_prime[k].count();
    if (a.count() < need) throw InvalidArgument("A_k has fewer cells than E'_k; refine first");
    // Fixed points first, then the remaining cells of A_k in index order.
    GridSet fixed = intersection(a, e_prime[k]);
    fixed.for_each([&](std::size_t i) {
      r.perm[i] = static_cast<std::uint32_t>(i);
      assigned[i] = taken[i] = 1;
    });
    const std::size_t wanted = need - fixed.count();
    std::vector<std::size_t> targets;
    targets.reserve(wanted);
    difference(a, fixed).for_each([&](std::size_t i) {
      if (targets.size() < wanted) targets.push_back(i);
    });
    std::size_t t = 0;
    difference(e_prime[k], fixed).for_each([&](std::size_t i) {
      r.perm[i] = static_cast<std::uint32_t>(targets[t]);
      assigned[i] = 1;
      taken[targets[t]] = 1;
      ++t;
    });
  }
  // Complement: identity where possible, the rest matched in index order.
  std::vector<std::size_t> free_targets;
  for (std::size_t i = 0; i < N; ++i)
    if (!assigned[i] && !taken[i]) {
      r.perm[i] = static_cast<std::uint32_t>(i);
      assigned[i] = taken[i] = 1;
    }
  for (std::size_t i = 0; i < N; ++i)
    if (!taken[i]) free_targets.push_back(i);
  std::size_t t = 0;
  for (std::size_t i = 0; i < N; ++i)
    if (!assigned[i]) {
      if (t >= free_targets.size()) throw InvalidArgument("cell counts do not match");
      r.perm[i] = static_cast<std::uint32_t>(free_targets[t++]);
    }
  return r;
}

ClassFunction compose(const ClassFunction& f, const Rearrangement& r) {
  if (f.grid != r.grid) throw InvalidArgument("rearrangement and function use different grids");
  ClassFunction out;
  out.grid = f.grid;
  out.values = f.values;
  out.cls.resize(f.cls.size());
  for (std::size_t i = 0; i < f.cls.size(); ++i) out.cls[i] = f.cls[r.perm[i]];
  return out;
}

RearrangementCheck verify_rearrangement(const Rearrangement& r, const ClassFunction& f, const ClassFunction& g) {
  RearrangementCheck c;
  const std::size_t N = r.grid.cell_count();
  std::vector<std::uint8_t> hit(N, 0);
  c.permutation = r.perm.size() == N;
  for (std::size_t i = 0; c.permutation && i < N; ++i) {
    if (r.perm[i] >= N || hit[r.perm[i]]) c.permutation = false;
    else hit[r.perm[i]] = 1;
    if (r.perm[i] != i) ++c.moved;
  }
  if (!c.permutation) return c;
  auto inv = r.inverse();
  c.inverse = true;
  for (std::size_t i = 0; i < N; ++i)
    if (r.perm[inv[i]] != i || inv[r.perm[i]] != i) c.inverse = false;
  // Cells outside the unit cube are not part of the grid, so they stay fixed
  // provided the grid is exactly the cube.
  c.identity_outside = r.grid.is_unit_cube();
  auto fw = compose(f, r);
  c.histogram = fw.value_histogram() == f.value_histogram();
  c.dominates = g.grid == fw.grid;
  std::vector<std::vector<std::uint8_t>> ge(fw.values.size(), std::vector<std::uint8_t>(g.values.size()));
  for (std::size_t a = 0; a < fw.values.size(); ++a)
    for (std::size_t b = 0; b < g.values.size(); ++b) ge[a][b] = fw.values[a] >= g.values[b];
  for (std::size_t i = 0; c.dominates && i < N; ++i)
    if (!ge[fw.cls[i]][g.cls[i]]) c.dominates = false;
  return c;
}

std::uint64_t grid_checksum(const ClassFunction& f) {
  std::ostringstream os;
  write_class_function(os, f);
  const std::string s = os.str();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

void write_rearrangement(std::ostream& out, const Rearrangement& r, std::uint64_t source_checksum) {
  out << "# permutation " << r.grid.describe() << " source-fnv1a " << std::hex << source_checksum << std::dec << '\n';
  for (auto p : r.perm) out << p << '\n';
}

}  // namespace resonance
