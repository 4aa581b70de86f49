#include "resonance/rotated.hpp"

#include "resonance/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace resonance {

Rotation Rotation::of(double gamma) {
  const double q = gamma / (std::numbers::pi / 4);
  const double k = std::round(q);
  if (std::abs(q - k) < 1e-12) {
    constexpr double h = std::numbers::sqrt2 / 2;
    static const Rotation table[8] = {{1, 0}, {h, h}, {0, 1}, {-h, h}, {-1, 0}, {-h, -h}, {0, -1}, {h, -h}};
    long long idx = ((static_cast<long long>(k) % 8) + 8) % 8;
    return table[idx];
  }
  return {std::cos(gamma), std::sin(gamma)};
}

double RotatedRect::diameter() const { return std::hypot(a, b); }

namespace {

// Intersects [lo, hi] with {t : coef * t in [lo_b, hi_b]}.
bool restrict_interval(double coef, double lo_b, double hi_b, double& lo, double& hi) {
  if (coef == 0.0) return lo_b <= 0.0 && 0.0 <= hi_b;
  double t0 = lo_b / coef, t1 = hi_b / coef;
  if (t0 > t1) std::swap(t0, t1);
  lo = std::max(lo, t0);
  hi = std::min(hi, t1);
  return lo <= hi;
}

struct Extent {
  double hx, hy;
};

Extent half_extent(const RotatedRect& r, const Rotation& rot) {
  return {(std::abs(rot.c) * r.a + std::abs(rot.s) * r.b) / 2, (std::abs(rot.s) * r.a + std::abs(rot.c) * r.b) / 2};
}

void require_square_cells(const DyadicGrid& g) {
  if (g.dim() != 2) throw InvalidArgument("rotated bases are planar (n = 2)");
  if (g.cell_length(0) != g.cell_length(1)) throw InvalidArgument("rotated evaluation needs square cells");
}

// Number of set bits of `words` in [begin, end).
std::size_t count_range(const std::vector<std::uint64_t>& words, std::size_t begin, std::size_t end) {
  if (begin >= end) return 0;
  std::size_t total = 0;
  std::size_t wb = begin >> 6, we = (end - 1) >> 6;
  for (std::size_t w = wb; w <= we; ++w) {
    std::uint64_t bits = words[w];
    if (w == wb) bits &= ~std::uint64_t{0} << (begin & 63);
    if (w == we && ((end & 63) != 0)) bits &= (std::uint64_t{1} << (end & 63)) - 1;
    total += static_cast<std::size_t>(std::popcount(bits));
  }
  return total;
}

}  // namespace

bool RotatedRect::line_interval(double x, double& lo, double& hi) const {
  const Rotation rot = Rotation::of(gamma);
  const double dx = x - cx;
  double tlo = -INFINITY, thi = INFINITY;
  // u = dx c + t s in [-a/2, a/2],  v = -dx s + t c in [-b/2, b/2], t = y - cy.
  if (!restrict_interval(rot.s, -a / 2 - dx * rot.c, a / 2 - dx * rot.c, tlo, thi)) return false;
  if (!restrict_interval(rot.c, -b / 2 + dx * rot.s, b / 2 + dx * rot.s, tlo, thi)) return false;
  if (!std::isfinite(tlo) || !std::isfinite(thi)) return false;
  lo = cy + tlo;
  hi = cy + thi;
  return true;
}

void cells_inside_column(const RotatedRect& r, std::int64_t x, std::int64_t& first, std::int64_t& last) {
  first = 0;
  last = 0;
  double lo0, hi0, lo1, hi1;
  if (!r.line_interval(static_cast<double>(x), lo0, hi0)) return;
  if (!r.line_interval(static_cast<double>(x + 1), lo1, hi1)) return;
  const double lo = std::max(lo0, lo1) + kCertMargin;
  const double hi = std::min(hi0, hi1) - kCertMargin;
  if (!(lo < hi)) return;
  first = static_cast<std::int64_t>(std::ceil(lo));
  last = static_cast<std::int64_t>(std::floor(hi));
  if (last < first) last = first;
}

double clipped_area(const RotatedRect& r, double x0, double y0, double x1, double y1) {
  const Rotation rot = Rotation::of(r.gamma);
  std::vector<std::pair<double, double>> poly;
  poly.reserve(8);
  const double ua = r.a / 2, vb = r.b / 2;
  const double su[4] = {-1, 1, 1, -1}, sv[4] = {-1, -1, 1, 1};
  for (int i = 0; i < 4; ++i) {
    double u = su[i] * ua, v = sv[i] * vb;
    poly.emplace_back(r.cx + u * rot.c - v * rot.s, r.cy + u * rot.s + v * rot.c);
  }
  // Sutherland-Hodgman against the four half-planes of the box.
  auto clip = [&](auto inside, auto cross) {
    std::vector<std::pair<double, double>> out;
    out.reserve(poly.size() + 4);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& p = poly[i];
      const auto& q = poly[(i + 1) % poly.size()];
      bool pin = inside(p), qin = inside(q);
      if (pin) out.push_back(p);
      if (pin != qin) out.push_back(cross(p, q));
    }
    poly = std::move(out);
  };
  auto at_x = [](double X) {
    return [X](const std::pair<double, double>& p, const std::pair<double, double>& q) {
      double t = (X - p.first) / (q.first - p.first);
      return std::pair<double, double>{X, p.second + t * (q.second - p.second)};
    };
  };
  auto at_y = [](double Y) {
    return [Y](const std::pair<double, double>& p, const std::pair<double, double>& q) {
      double t = (Y - p.second) / (q.second - p.second);
      return std::pair<double, double>{p.first + t * (q.first - p.first), Y};
    };
  };
  clip([&](const auto& p) { return p.first >= x0; }, at_x(x0));
  if (poly.empty()) return 0.0;
  clip([&](const auto& p) { return p.first <= x1; }, at_x(x1));
  if (poly.empty()) return 0.0;
  clip([&](const auto& p) { return p.second >= y0; }, at_y(y0));
  if (poly.empty()) return 0.0;
  clip([&](const auto& p) { return p.second <= y1; }, at_y(y1));
  if (poly.size() < 3) return 0.0;
  double area2 = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    area2 += p.first * q.second - q.first * p.second;
  }
  return std::abs(area2) / 2;
}

double rotated_average(const StepFunction& f, const RotatedRect& rect) {
  const auto& g = f.grid();
  if (g.dim() != 2) throw InvalidArgument("rotated averages are planar (n = 2)");
  if (!(rect.a > 0) || !(rect.b > 0)) throw InvalidArgument("degenerate rotated rectangle");
  const Rotation rot = Rotation::of(rect.gamma);
  const Extent e = half_extent(rect, rot);
  const double ox = to_double(g.origin()[0]), oy = to_double(g.origin()[1]);
  const double lx = to_double(g.cell_length(0)), ly = to_double(g.cell_length(1));
  auto lo_idx = [](double v, std::int64_t n) { return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(v)), 0, n); };
  auto hi_idx = [](double v, std::int64_t n) { return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(v)), 0, n); };
  const std::int64_t i0 = lo_idx((rect.cx - e.hx - ox) / lx, g.cells_along(0));
  const std::int64_t i1 = hi_idx((rect.cx + e.hx - ox) / lx, g.cells_along(0));
  const std::int64_t j0 = lo_idx((rect.cy - e.hy - oy) / ly, g.cells_along(1));
  const std::int64_t j1 = hi_idx((rect.cy + e.hy - oy) / ly, g.cells_along(1));
  double sum = 0.0;
  for (std::int64_t i = i0; i < i1; ++i)
    for (std::int64_t j = j0; j < j1; ++j) {
      double v = f.value(static_cast<std::size_t>(i * g.cells_along(1) + j));
      if (v == 0.0) continue;
      double x0 = ox + i * lx, y0 = oy + j * ly;
      sum += v * clipped_area(rect, x0, y0, x0 + lx, y0 + ly);
    }
  return sum / (rect.a * rect.b);
}

std::vector<double> sampled_sides(const RotatedSampling& s) {
  if (!(s.side_step > 0) || !(s.geometric_ratio > 1) || !(s.max_side > 0))
    throw InvalidArgument("bad rotated sampling parameters");
  std::vector<double> out;
  double v = s.side_step;
  for (int k = 1; v <= s.linear_limit && v <= s.max_side; ++k, v = k * s.side_step) out.push_back(v);
  double g = out.empty() ? s.side_step : out.back();
  while ((g *= s.geometric_ratio) <= s.max_side) out.push_back(g);
  return out;
}

namespace {

// Fully-inside count of e's cells in r (cell units).
std::size_t inside_count(const GridSet& e, const RotatedRect& r, const Extent& ext) {
  const auto& g = e.grid();
  const std::int64_t nx = g.cells_along(0), ny = g.cells_along(1);
  const std::int64_t x0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(r.cx - ext.hx)));
  const std::int64_t x1 = std::min<std::int64_t>(nx, static_cast<std::int64_t>(std::ceil(r.cx + ext.hx)));
  std::size_t count = 0;
  for (std::int64_t x = x0; x < x1; ++x) {
    std::int64_t first, last;
    cells_inside_column(r, x, first, last);
    first = std::max<std::int64_t>(first, 0);
    last = std::min<std::int64_t>(last, ny);
    if (first < last)
      count += count_range(e.words(), static_cast<std::size_t>(x * ny + first), static_cast<std::size_t>(x * ny + last));
  }
  return count;
}

bool qualifies(double h, std::size_t count, const RotatedRect& r) {
  return h * static_cast<double>(count) > r.a * r.b * (1 + kCertMargin);
}

}  // namespace

bool certify_rotated(const GridSet& e, double h, const RotatedRect& r) {
  require_square_cells(e.grid());
  return qualifies(h, inside_count(e, r, half_extent(r, Rotation::of(r.gamma))), r);
}

RotatedLevelSet rotated_level_set(const GridSet& e, double h, double gamma, double r_cells,
                                  const RotatedSampling& sampling) {
  const auto& g = e.grid();
  require_square_cells(g);
  if (!(h > 0)) throw InvalidArgument("amplitude must be > 0");
  const std::int64_t nx = g.cells_along(0), ny = g.cells_along(1);
  RotatedLevelSet out{GridSet(g), {}};
  const std::size_t ecount = e.count();
  if (ecount == 0) return out;

  std::int64_t ex0 = nx, ex1 = 0, ey0 = ny, ey1 = 0;
  e.for_each([&](std::size_t i) {
    std::int64_t x = static_cast<std::int64_t>(i) / ny, y = static_cast<std::int64_t>(i) % ny;
    ex0 = std::min(ex0, x);
    ex1 = std::max(ex1, x + 1);
    ey0 = std::min(ey0, y);
    ey1 = std::max(ey1, y + 1);
  });

  // Per column, next unmarked y (path-compressed), so marking is amortised.
  std::vector<std::int64_t> next(static_cast<std::size_t>(nx * (ny + 1)));
  for (std::int64_t x = 0; x < nx; ++x)
    for (std::int64_t y = 0; y <= ny; ++y) next[x * (ny + 1) + y] = y;
  auto find = [&](std::int64_t x, std::int64_t y) {
    std::int64_t* col = next.data() + x * (ny + 1);
    std::int64_t root = y;
    while (col[root] != root) root = col[root];
    while (col[y] != root) {
      std::int64_t nxt = col[y];
      col[y] = root;
      y = nxt;
    }
    return root;
  };

  const Rotation rot = Rotation::of(gamma);
  const auto sides = sampled_sides(sampling);
  const double budget = h * static_cast<double>(ecount);
  const double r2 = r_cells * r_cells * (1 - kCertMargin);
  const double step = sampling.center_step;
  for (double a : sides) {
    for (double b : sides) {
      if (a * b >= budget) break;
      if (!(a * a + b * b < r2)) break;
      RotatedRect proto{0, 0, a, b, gamma};
      const Extent ext = half_extent(proto, rot);
      // Centres whose bounding box meets both E's bounding box and the grid.
      const double cx_lo = std::max(ex0 - ext.hx, -ext.hx), cx_hi = std::min(ex1 + ext.hx, nx + ext.hx);
      const double cy_lo = std::max(ey0 - ext.hy, -ext.hy), cy_hi = std::min(ey1 + ext.hy, ny + ext.hy);
      for (double cx = std::ceil(cx_lo / step) * step; cx <= cx_hi; cx += step) {
        for (double cy = std::ceil(cy_lo / step) * step; cy <= cy_hi; cy += step) {
          RotatedRect r{cx, cy, a, b, gamma};
          if (!qualifies(h, inside_count(e, r, ext), r)) continue;
          const std::int64_t x0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(cx - ext.hx)));
          const std::int64_t x1 = std::min<std::int64_t>(nx, static_cast<std::int64_t>(std::ceil(cx + ext.hx)));
          for (std::int64_t x = x0; x < x1; ++x) {
            std::int64_t first, last;
            cells_inside_column(r, x, first, last);
            first = std::max<std::int64_t>(first, 0);
            last = std::min<std::int64_t>(last, ny);
            for (std::int64_t y = first < last ? find(x, first) : last; y < last; y = find(x, y)) {
              std::size_t idx = static_cast<std::size_t>(x * ny + y);
              out.set.set(idx);
              out.certificates.emplace_back(idx, r);
              next[x * (ny + 1) + y] = y + 1;
            }
          }
        }
      }
    }
  }
  std::sort(out.certificates.begin(), out.certificates.end(),
            [](const auto& p, const auto& q) { return p.first < q.first; });
  return out;
}

MaxField rotated_max_field(const StepFunction& f, double gamma, double r, const RotatedSampling& sampling) {
  const auto& g = f.grid();
  require_square_cells(g);
  if (!(r > 0)) throw InvalidArgument("truncation radius must be > 0");
  const std::int64_t nx = g.cells_along(0), ny = g.cells_along(1);
  const double cell = to_double(g.cell_length(0));
  const double r_cells = r / cell;
  // Column prefix sums of f.
  std::vector<double> pre(static_cast<std::size_t>(nx * (ny + 1)), 0.0);
  for (std::int64_t x = 0; x < nx; ++x)
    for (std::int64_t y = 0; y < ny; ++y)
      pre[x * (ny + 1) + y + 1] = pre[x * (ny + 1) + y] + f.value(static_cast<std::size_t>(x * ny + y));

  MaxField out;
  out.grid = g;
  out.basis = BasisSpec::rotated(gamma);
  out.r = r;
  out.mode = ValueMode::Double;
  out.lower_bound = true;
  out.values.assign(g.cell_count(), 0.0);

  RotatedSampling s = sampling;
  s.max_side = std::min(s.max_side, std::sqrt(2.0) * static_cast<double>(std::max(nx, ny)) + 1);
  const auto sides = sampled_sides(s);
  const Rotation rot = Rotation::of(gamma);
  const double r2 = r_cells * r_cells * (1 - kCertMargin);
  for (double a : sides) {
    for (double b : sides) {
      if (!(a * a + b * b < r2)) break;
      const Extent ext = half_extent({0, 0, a, b, gamma}, rot);
      for (double cx = 0; cx <= static_cast<double>(nx); cx += s.center_step) {
        for (double cy = 0; cy <= static_cast<double>(ny); cy += s.center_step) {
          RotatedRect rr{cx, cy, a, b, gamma};
          const std::int64_t x0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(cx - ext.hx)));
          const std::int64_t x1 = std::min<std::int64_t>(nx, static_cast<std::int64_t>(std::ceil(cx + ext.hx)));
          double sum = 0.0;
          for (std::int64_t x = x0; x < x1; ++x) {
            std::int64_t first, last;
            cells_inside_column(rr, x, first, last);
            first = std::max<std::int64_t>(first, 0);
            last = std::min<std::int64_t>(last, ny);
            if (first < last) sum += pre[x * (ny + 1) + last] - pre[x * (ny + 1) + first];
          }
          if (sum <= 0.0) continue;
          const double avg = sum / (a * b);
          for (std::int64_t x = x0; x < x1; ++x) {
            double lo, hi;
            if (!rr.line_interval(x + 0.5, lo, hi)) continue;
            std::int64_t y0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(lo - 0.5 + kCertMargin)));
            std::int64_t y1 = std::min<std::int64_t>(ny - 1, static_cast<std::int64_t>(std::floor(hi - 0.5 - kCertMargin)));
            for (std::int64_t y = y0; y <= y1; ++y) {
              auto& v = out.values[static_cast<std::size_t>(x * ny + y)];
              v = std::max(v, avg);
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace resonance
