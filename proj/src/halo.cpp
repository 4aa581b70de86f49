#include "resonance/halo.hpp"

#include "resonance/errors.hpp"
#include "resonance/max_field.hpp"
#include "resonance/rotated.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace resonance {

GridSet discrete_ball(const DyadicGrid& grid, const std::vector<std::int64_t>& center, double r_cells) {
  const int n = grid.dim();
  if (static_cast<int>(center.size()) != n) throw InvalidArgument("ball centre has wrong dimension");
  const Rational r = rational_from_double(r_cells);
  const Rational r2 = r * r;
  GridSet s(grid);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    Coord c = grid.coord(i);
    // Squared distance of the centre (c + 1/2) to the vertex, times 4.
    std::int64_t d4 = 0;
    for (int j = 0; j < n; ++j) {
      std::int64_t d = 2 * (c[j] - center[j]) + 1;
      d4 += d * d;
    }
    if (Rational(d4) < 4 * r2) s.set(i);
  }
  return s;
}

std::vector<std::pair<std::int64_t, std::int64_t>> ball_cells(double r_cells) {
  const Rational r = rational_from_double(r_cells);
  const Rational r2x4 = 4 * r * r;
  const auto R = static_cast<std::int64_t>(std::ceil(r_cells)) + 1;
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t i = -R; i < R; ++i)
    for (std::int64_t j = -R; j < R; ++j) {
      std::int64_t a = 2 * i + 1, b = 2 * j + 1;
      if (Rational(a * a + b * b) < r2x4) out.emplace_back(i, j);
    }
  return out;
}

namespace {

constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max() / 4;

// Largest integer w >= 0 with W^2 + w^2 < rho^2, or -1 if none.
class DiameterBound {
 public:
  explicit DiameterBound(double rho) : infinite_(std::isinf(rho)) {
    if (!infinite_) rho2_ = rational_from_double(rho) * rational_from_double(rho);
  }
  std::int64_t operator()(std::int64_t W) {
    if (infinite_) return kUnbounded;
    if (W < static_cast<std::int64_t>(cache_.size())) return cache_[W];
    while (static_cast<std::int64_t>(cache_.size()) <= W) cache_.push_back(compute(static_cast<std::int64_t>(cache_.size())));
    return cache_[W];
  }

 private:
  std::int64_t compute(std::int64_t W) const {
    Rational rest = rho2_ - Rational(W) * W;
    if (rest <= 0) return -1;
    auto w = static_cast<std::int64_t>(std::sqrt(to_double(rest)));
    while (w > 0 && Rational(w) * w >= rest) --w;
    while (Rational(w + 1) * (w + 1) < rest) ++w;
    return Rational(w) * w < rest ? w : -1;
  }

  bool infinite_;
  Rational rho2_;
  std::vector<std::int64_t> cache_;
};

// Mask view with optional flips and transposition, dimensions b0 x b1.
struct Oriented {
  std::vector<std::uint8_t> cells;
  std::int64_t b0, b1;
};

Oriented orient(const std::vector<std::uint8_t>& mask, std::int64_t b0, std::int64_t b1, bool transpose, bool flip0,
                bool flip1) {
  Oriented o;
  o.b0 = transpose ? b1 : b0;
  o.b1 = transpose ? b0 : b1;
  o.cells.assign(static_cast<std::size_t>(o.b0 * o.b1), 0);
  for (std::int64_t i = 0; i < o.b0; ++i)
    for (std::int64_t j = 0; j < o.b1; ++j) {
      std::int64_t si = transpose ? j : i, sj = transpose ? i : j;
      if (flip0) si = b0 - 1 - si;
      if (flip1) sj = b1 - 1 - sj;
      o.cells[i * o.b1 + j] = mask[si * b1 + sj];
    }
  return o;
}

// prefix[(i)*(b1+1)+j] = |S ∩ [0,i) x [0,j)|
std::vector<std::int64_t> prefix_counts(const Oriented& o) {
  std::vector<std::int64_t> p(static_cast<std::size_t>((o.b0 + 1) * (o.b1 + 1)), 0);
  for (std::int64_t i = 1; i <= o.b0; ++i)
    for (std::int64_t j = 1; j <= o.b1; ++j)
      p[i * (o.b1 + 1) + j] = o.cells[(i - 1) * o.b1 + (j - 1)] + p[(i - 1) * (o.b1 + 1) + j] +
                              p[i * (o.b1 + 1) + j - 1] - p[(i - 1) * (o.b1 + 1) + j - 1];
  return p;
}

// Cells x with x0 < 0 and x1 < 0 (relative to the crop).
std::uint64_t quadrant_count(const Oriented& o, const std::vector<std::int64_t>& amax, DiameterBound& diam) {
  const auto p = prefix_counts(o);
  struct Corner {
    std::int64_t a, b, A;
  };
  std::vector<Corner> all;
  for (std::int64_t a = 1; a <= o.b0; ++a)
    for (std::int64_t b = 1; b <= o.b1; ++b) {
      std::int64_t cnt = p[a * (o.b1 + 1) + b];
      if (cnt > 0) all.push_back({a, b, amax[cnt]});
    }
  // Drop corners dominated by one that is no farther and admits as much area.
  std::vector<Corner> corners;
  for (const auto& c : all) {
    bool dominated = false;
    for (const auto& d : all)
      if (d.a <= c.a && d.b <= c.b && d.A >= c.A && (d.a != c.a || d.b != c.b || d.A != c.A)) {
        dominated = true;
        break;
      }
    if (!dominated) corners.push_back(c);
  }
  std::uint64_t total = 0;
  for (std::int64_t u = 0;; ++u) {
    std::int64_t best = -1;
    for (const auto& c : corners) {
      const std::int64_t W1 = c.a + 1 + u;
      const std::int64_t w2 = std::min(c.A / W1, diam(W1));
      best = std::max(best, w2 - c.b - 1);
    }
    if (best < 0) break;
    total += static_cast<std::uint64_t>(best + 1);
  }
  return total;
}

// Cells x with x0 < 0 and 0 <= x1 < b1.
std::uint64_t strip_count(const Oriented& o, const std::vector<std::int64_t>& amax, DiameterBound& diam) {
  const auto p = prefix_counts(o);
  auto count = [&](std::int64_t c0, std::int64_t y0, std::int64_t y1) {
    return p[c0 * (o.b1 + 1) + y1] - p[c0 * (o.b1 + 1) + y0];
  };
  std::uint64_t total = 0;
  for (std::int64_t y = 0; y < o.b1; ++y) {
    std::int64_t best = -1;
    for (std::int64_t y0 = 0; y0 <= y; ++y0)
      for (std::int64_t y1 = y + 1; y1 <= o.b1; ++y1) {
        const std::int64_t W2 = y1 - y0;
        const std::int64_t w1 = std::min(kUnbounded, diam(W2));
        for (std::int64_t c0 = 1; c0 <= o.b0; ++c0) {
          std::int64_t cnt = count(c0, y0, y1);
          if (cnt == 0) continue;
          best = std::max(best, std::min(amax[cnt] / W2, w1) - c0 - 1);
        }
      }
    if (best >= 0) total += static_cast<std::uint64_t>(best + 1);
  }
  return total;
}

// Cells inside the crop covered by a qualifying sub-box.
std::uint64_t inside_count(const Oriented& o, const std::vector<std::int64_t>& amax, DiameterBound& diam) {
  const auto p = prefix_counts(o);
  const std::int64_t s = o.b1 + 1;
  std::vector<std::int64_t> diff(static_cast<std::size_t>((o.b0 + 1) * s), 0);
  for (std::int64_t i0 = 0; i0 < o.b0; ++i0)
    for (std::int64_t i1 = i0 + 1; i1 <= o.b0; ++i1)
      for (std::int64_t j0 = 0; j0 < o.b1; ++j0)
        for (std::int64_t j1 = j0 + 1; j1 <= o.b1; ++j1) {
          std::int64_t cnt = p[i1 * s + j1] - p[i0 * s + j1] - p[i1 * s + j0] + p[i0 * s + j0];
          if (cnt == 0) continue;
          const std::int64_t W0 = i1 - i0, W1 = j1 - j0;
          if (W0 * W1 > amax[cnt] || W1 > diam(W0)) continue;
          ++diff[i0 * s + j0];
          --diff[i1 * s + j0];
          --diff[i0 * s + j1];
          ++diff[i1 * s + j1];
        }
  std::uint64_t total = 0;
  for (std::int64_t i = 0; i <= o.b0; ++i)
    for (std::int64_t j = 0; j <= o.b1; ++j) {
      std::int64_t v = diff[i * s + j];
      if (i > 0) v += diff[(i - 1) * s + j];
      if (j > 0) v += diff[i * s + j - 1];
      if (i > 0 && j > 0) v -= diff[(i - 1) * s + j - 1];
      diff[i * s + j] = v;
      if (i < o.b0 && j < o.b1 && v > 0) ++total;
    }
  return total;
}

}  // namespace

std::uint64_t strong_level_set_count(const std::vector<std::uint8_t>& mask, std::int64_t b0, std::int64_t b1,
                                     const Rational& h, double rho) {
  if (static_cast<std::int64_t>(mask.size()) != b0 * b1) throw InvalidArgument("mask size mismatch");
  if (h <= 0) throw InvalidArgument("amplitude must be > 0");
  std::int64_t total_cells = 0;
  for (auto c : mask) total_cells += c ? 1 : 0;
  // Largest admissible area for each count: h * count > area.
  std::vector<std::int64_t> amax(static_cast<std::size_t>(total_cells + 1), -1);
  for (std::int64_t c = 1; c <= total_cells; ++c) {
    Rational v = h * c;
    BigInt fl = boost::multiprecision::numerator(v) / boost::multiprecision::denominator(v);
    BigInt ce = Rational(fl) == v ? fl : fl + 1;
    amax[c] = (ce - 1).convert_to<std::int64_t>();
  }
  DiameterBound diam(rho);
  std::uint64_t total = inside_count(orient(mask, b0, b1, false, false, false), amax, diam);
  for (bool f0 : {false, true})
    for (bool f1 : {false, true}) total += quadrant_count(orient(mask, b0, b1, false, f0, f1), amax, diam);
  for (bool tr : {false, true})
    for (bool fl : {false, true}) total += strip_count(orient(mask, b0, b1, tr, fl && !tr, fl && tr), amax, diam);
  return total;
}

namespace {

HaloSample window_sample(const HaloProbe& probe, double rho, double r_cells) {
  const int n = probe.n;
  const auto R = static_cast<std::int64_t>(std::ceil(r_cells));
  const auto margin = static_cast<std::int64_t>(std::ceil(rho)) + 1;
  std::int64_t side = 2 * (R + margin);
  int bits = 0;
  while ((std::int64_t{1} << bits) < side) ++bits;
  if (static_cast<double>(n) * bits > std::log2(static_cast<double>(probe.window_cap)))
    throw InfeasibleError("halo window exceeds the cell cap", -1, bits);
  DyadicGrid g = DyadicGrid::cube(n, bits);
  std::vector<std::int64_t> centre(n, std::int64_t{1} << (bits - 1));
  GridSet ball = discrete_ball(g, centre, r_cells);
  HaloSample s;
  s.r_cells = r_cells;
  s.ball_cells = ball.count();
  const double cell = std::ldexp(1.0, -bits);
  if (probe.basis.is_rotated() && !probe.basis.quarter_turn()) {
    s.level_cells = rotated_level_set(ball, probe.h, probe.basis.gamma, rho).set.count();
  } else {
    BasisSpec b = probe.basis.is_rotated() ? BasisSpec::axis(2) : probe.basis;
    auto f = StepFunction::indicator(ball, rational_from_double(probe.h), ValueMode::Rational);
    s.level_cells = level_set(max_field_fast(f, b, rho * cell), Rational(1)).count();
  }
  return s;
}

}  // namespace

HaloEstimate halo_estimate(const HaloProbe& probe, const std::vector<double>& t_list, const std::vector<double>& r_list,
                           bool weak_variant) {
  if (!(probe.h > 1)) throw InvalidArgument("halo amplitude must be > 1");
  if ((!weak_variant && t_list.empty()) || r_list.empty()) throw InvalidArgument("empty (t, r) lattice");
  for (double t : t_list)
    if (!(t > 1)) throw InvalidArgument("truncation multipliers must be > 1");
  HaloEstimate est;
  est.h = probe.h;
  est.weak_variant = weak_variant;
  const std::vector<double> ts = weak_variant ? std::vector<double>{probe.h} : t_list;
  const bool strong_planar = probe.n == 2 && (probe.basis.is_rotated() ? probe.basis.quarter_turn() : probe.basis.k >= 2);
  for (double r : r_list) {
    auto cells = ball_cells(r);
    if (probe.n == 2 && cells.size() < probe.min_ball_cells)
      throw InvalidArgument("ball too coarse for the smallest radius");
    for (double t : ts) {
      const double rho = t * r;
      HaloSample s;
      if (strong_planar) {
        std::int64_t lo0 = 0, hi0 = 0, lo1 = 0, hi1 = 0;
        for (auto [i, j] : cells) {
          lo0 = std::min(lo0, i);
          hi0 = std::max(hi0, i + 1);
          lo1 = std::min(lo1, j);
          hi1 = std::max(hi1, j + 1);
        }
        const std::int64_t b0 = hi0 - lo0, b1 = hi1 - lo1;
        std::vector<std::uint8_t> mask(static_cast<std::size_t>(b0 * b1), 0);
        for (auto [i, j] : cells) mask[(i - lo0) * b1 + (j - lo1)] = 1;
        s.r_cells = r;
        s.ball_cells = cells.size();
        s.level_cells = strong_level_set_count(mask, b0, b1, rational_from_double(probe.h), rho);
      } else {
        s = window_sample(probe, rho, r);
        if (s.ball_cells < probe.min_ball_cells) throw InvalidArgument("ball too coarse for the smallest radius");
      }
      s.t = t;
      s.ratio = static_cast<double>(s.level_cells) / static_cast<double>(s.ball_cells);
      est.phi_hat = std::max(est.phi_hat, s.ratio);
      est.samples.push_back(s);
    }
  }
  return est;
}

std::pair<double, double> halo_fit(const std::vector<double>& h, const std::vector<double>& phi, int exponent) {
  if (h.size() != phi.size() || h.size() < 3) throw InvalidArgument("halo_fit needs at least 3 samples");
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 1)) throw InvalidArgument("halo_fit needs h > 1");
    if (!(phi[i] > 0)) throw InvalidArgument("non-positive halo estimate");
    double model = h[i] * std::pow(1 + std::log(h[i]), exponent);
    lo = std::min(lo, phi[i] / model);
    hi = std::max(hi, phi[i] / model);
  }
  return {lo, hi};
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& phi) {
  if (h.size() != phi.size() || h.size() < 2) throw InvalidArgument("slope needs at least 2 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 1) || !(phi[i] > 0)) throw InvalidArgument("slope needs h > 1 and phi > 0");
    double x = std::log(std::log(h[i])), y = std::log(phi[i] / h[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double den = n * sxx - sx * sx;
  if (den == 0) throw InvalidArgument("degenerate h samples");
  return (n * sxy - sx * sy) / den;
}

namespace {
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
}  // namespace

void write_halo_csv(std::ostream& out, const HaloProbe& probe, const std::vector<HaloEstimate>& rows) {
  out << "basis,k,gamma,h,t,r,grid,ratio,phi_hat\n";
  const std::string kind = probe.basis.is_rotated() ? "rotated" : "axis";
  const double cell = std::ldexp(1.0, -probe.grid_bits);
  for (const auto& est : rows)
    for (const auto& s : est.samples)
      out << kind << ',' << probe.basis.k << ',' << fmt(probe.basis.gamma) << ',' << fmt(est.h) << ',' << fmt(s.t) << ','
          << fmt(s.r_cells * cell) << ',' << (std::int64_t{1} << probe.grid_bits) << ',' << fmt(s.ratio) << ','
          << fmt(est.phi_hat) << '\n';
}

void write_halo_gnuplot(std::ostream& out, const std::vector<HaloEstimate>& rows) {
  out << "# h phi_hat phi_hat/h\n";
  for (const auto& est : rows) out << fmt(est.h) << ' ' << fmt(est.phi_hat) << ' ' << fmt(est.phi_hat / est.h) << '\n';
}

}  // namespace resonance
