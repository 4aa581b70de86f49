#include "resonance/selection.hpp"

#include "resonance/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace resonance {

namespace {

double probe(double x) { return 1e-12 * std::max(std::abs(x), 1.0); }

bool fits_cap(std::size_t cells, const Rational& cell_volume, double cap) {
  if (std::isinf(cap)) return true;
  return cell_volume * cells <= rational_from_double(cap);
}

}  // namespace

std::vector<double> partition_increasing(const std::function<double(double)>& phi, double a, double b, double eps,
                                         std::size_t max_points) {
  if (!(a < b)) throw InvalidArgument("partition needs a < b");
  if (!(eps > 0)) throw InvalidArgument("partition needs eps > 0");
  std::vector<double> pts{a};
  double h = a;
  while (h < b) {
    if (pts.size() >= max_points) throw ConvergenceError("partition exceeded its point budget");
    const double base = phi(h + probe(h));
    auto ok = [&](double x) { return phi(x - probe(x)) - base <= eps; };
    double next;
    if (ok(b)) {
      next = b;
    } else {
      double lo = h, hi = b;
      for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi));
           ++it) {
        double mid = lo + (hi - lo) / 2;
        if (ok(mid))
          lo = mid;
        else
          hi = mid;
      }
      next = std::max(lo, h + 2 * probe(h));
      if (next >= b) next = b;
    }
    pts.push_back(next);
    h = next;
  }
  return pts;
}

StageSelection select_level_sets(const GrowthFunction& phi, const StepFunction& f, int k, const SizeCap& alpha,
                                 double target, const SelectionOptions& options) {
  if (k < 1) throw InvalidArgument("stage index must be positive");
  if (!(target > 0)) throw InvalidArgument("target mass must be positive");
  const DyadicGrid& grid = f.grid();
  const Rational cell = grid.cell_volume();
  const Rational floor = std::max(Rational(k), options.floor);

  std::map<Rational, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < f.size(); ++i) {
    Rational v = f.exact(i);
    if (v > floor) classes[v].push_back(i);
  }
  if (classes.empty()) throw InfeasibleError("no values above the stage floor");

  auto phik = [&](double t) { return phi(t / k); };
  std::vector<Rational> values;
  for (const auto& [v, cells] : classes) {
    values.push_back(v);
    const double a = to_double(values.front()), b = to_double(values.back());
    StageSelection out;
    out.band_low = values.front();
    out.band_high = values.back();

    // Sub-bands [h_i, h_{i+1}) over the band, the last one closed.
    std::vector<double> cuts{a};
    if (b > a) cuts = partition_increasing(phik, a, b, options.band_tolerance * phik(a));
    std::vector<std::vector<std::size_t>> groups(cuts.size());
    std::vector<Rational> mins(cuts.size());
    for (const auto& value : values) {
      const double x = to_double(value);
      std::size_t g = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
      g = g == 0 ? 0 : g - 1;
      if (g + 1 == cuts.size() && g > 0) --g;
      auto& dst = groups[g];
      if (dst.empty()) mins[g] = value;
      const auto& src = classes.at(value);
      dst.insert(dst.end(), src.begin(), src.end());
    }

    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].empty()) continue;
      auto& idx = groups[g];
      std::sort(idx.begin(), idx.end());
      const double ratio = to_double(mins[g]) / k;
      const double cap = alpha(ratio);
      std::size_t chunk = idx.size();
      if (!std::isinf(cap)) {
        Rational cells = rational_from_double(cap) / cell;
        BigInt whole = numerator(cells) / denominator(cells);
        if (whole < BigInt(chunk)) chunk = static_cast<std::size_t>(whole);
      }
      if (chunk == 0) throw InfeasibleError("size cap is below one cell");
      for (std::size_t start = 0; start < idx.size(); start += chunk) {
        std::size_t stop = std::min(idx.size(), start + chunk);
        LevelPiece piece{GridSet(grid), mins[g]};
        for (std::size_t p = start; p < stop; ++p) piece.set.set(idx[p]);
        out.mass += phi(ratio) * to_double(piece.set.measure());
        out.pieces.push_back(std::move(piece));
      }
    }
    if (out.mass >= target) return out;
  }
  throw InfeasibleError("values above the stage floor cannot reach the target mass");
}

LevelSelection build_divergent_sequences(const GrowthFunction& phi, const StepFunction& f, const SizeCap& alpha,
                                         int depth, double target_scale) {
  if (depth < 1) throw InvalidArgument("depth must be positive");
  LevelSelection sel;
  SelectionOptions opt;
  for (int i = 1; i <= depth; ++i) {
    StageSelection st;
    try {
      st = select_level_sets(phi, f, i, alpha, target_scale * i, opt);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(std::string("stage ") + std::to_string(i) + ": " + e.what(), i - 1);
    }
    for (auto& p : st.pieces) {
      sel.sets.push_back(std::move(p.set));
      sel.h.push_back(p.h);
      sel.q.push_back(i);
      sel.stage.push_back(i);
    }
    sel.stage_mass.push_back(st.mass);
    opt.floor = st.band_high;
  }
  return sel;
}

SelectionCheck check_selection(const LevelSelection& sel, const StepFunction& f, const SizeCap& alpha) {
  SelectionCheck c;
  c.disjoint = c.amplitudes = c.q_nondecreasing = c.q_strictly_increasing = c.caps = true;
  GridSet seen(f.grid());
  for (std::size_t j = 0; j < sel.size(); ++j) {
    if (intersection_count(seen, sel.sets[j]) != 0) c.disjoint = false;
    seen = set_union(seen, sel.sets[j]);
    if (!(Rational(sel.q[j]) < sel.h[j])) c.amplitudes = false;
    sel.sets[j].for_each([&](std::size_t i) {
      if (f.exact(i) < sel.h[j]) c.amplitudes = false;
    });
    if (!fits_cap(sel.sets[j].count(), f.grid().cell_volume(), alpha(to_double(sel.h[j]) / sel.q[j]))) c.caps = false;
    if (j > 0) {
      if (sel.q[j] < sel.q[j - 1]) c.q_nondecreasing = false;
      if (sel.q[j] <= sel.q[j - 1]) c.q_strictly_increasing = false;
    }
  }
  return c;
}

}  // namespace resonance
