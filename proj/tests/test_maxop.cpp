#include <doctest.h>

#include "resonance/errors.hpp"
#include "resonance/integral_image.hpp"
#include "resonance/max_field.hpp"
#include "resonance/rotated.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace resonance;

namespace {

StepFunction random_rational(const DyadicGrid& g, std::mt19937_64& rng, double zero_p = 0.3) {
  std::uniform_int_distribution<int> num(0, 20), den(1, 6);
  std::bernoulli_distribution zero(zero_p);
  std::vector<Rational> v(g.cell_count());
  for (auto& x : v) x = zero(rng) ? Rational(0) : Rational(num(rng), den(rng));
  return StepFunction::from_rationals(g, v);
}

// Every admissible rectangle containing the cell, summed cell by cell.
Rational naive_field_at(const StepFunction& f, int k, double r, const Coord& x) {
  const auto& g = f.grid();
  const int n = g.dim();
  Rational best(0);
  Coord lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    lo[j] = x[j] - g.cells_along(j) + 1;
    hi[j] = x[j] + 1;
  }
  std::function<void(int)> rec = [&](int axis) {
    if (axis == n) {
      Coord w(n);
      for (int j = 0; j < n; ++j) w[j] = hi[j] - lo[j];
      if (!edge_pattern_ok(w, g, k) || !diameter_below(w, g, r)) return;
      AxisRect rect{lo, hi};
      Rational s(0);
      std::int64_t area = rect.cell_count();
      for (std::size_t i = 0; i < g.cell_count(); ++i)
        if (f.rationals()[i] != 0 && rect.contains(g.coord(i))) s += f.rationals()[i];
      best = std::max(best, s / area);
      return;
    }
    const Coord save_lo = lo, save_hi = hi;
    for (std::int64_t a = x[axis] - g.cells_along(axis) + 1; a <= x[axis]; ++a)
      for (std::int64_t b = x[axis] + 1; b - a <= g.cells_along(axis); ++b) {
        lo[axis] = a;
        hi[axis] = b;
        rec(axis + 1);
      }
    lo = save_lo;
    hi = save_hi;
  };
  rec(0);
  return best;
}

}  // namespace

TEST_CASE("enumerate_shapes") {
  auto all = enumerate_shapes(BasisSpec::axis(2), DyadicGrid::cube(2, 2), kNoTruncation);
  CHECK(all.size() == 16);

  auto three = enumerate_shapes(BasisSpec::axis(2), DyadicGrid::cube(3, 2), kNoTruncation);
  for (const auto& w : three) CHECK((w[0] == w[1] || w[1] == w[2] || w[0] == w[2]));
  CHECK(three.size() == 64 - 4 * 3 * 2);

  auto trunc = enumerate_shapes(BasisSpec::axis(2), DyadicGrid::cube(2, 3), 0.3);
  std::size_t expect = 0;
  for (int w = 1; w <= 8; ++w)
    for (int h = 1; h <= 8; ++h)
      if (std::sqrt((w / 8.0) * (w / 8.0) + (h / 8.0) * (h / 8.0)) < 0.3) ++expect;
  CHECK(trunc.size() == expect);
  for (const auto& w : trunc) CHECK(w[0] * w[0] + w[1] * w[1] < 5.76);

  CHECK_THROWS_AS(enumerate_shapes(BasisSpec::axis(2), DyadicGrid::cube(2, 3), 0.1), InvalidArgument);
}

TEST_CASE("brute field spec examples") {
  DyadicGrid g = DyadicGrid::cube(2, 2);
  StepFunction c = StepFunction::from_rationals(g, std::vector<Rational>(16, Rational(7, 3)));
  auto fc = max_field_brute(c, BasisSpec::axis(2), kNoTruncation);
  for (std::size_t i = 0; i < 16; ++i) CHECK(fc.exact(i) == Rational(7, 3));

  GridSet corner(g);
  corner.set(0);
  auto fi = max_field_brute(StepFunction::indicator(corner, Rational(1), ValueMode::Rational), BasisSpec::axis(2),
                            kNoTruncation);
  CHECK(fi.exact(g.index(std::vector<std::int64_t>{3, 3})) == Rational(1, 16));
  CHECK(fi.exact(0) == 1);
  CHECK(fi.exact(g.index(std::vector<std::int64_t>{0, 3})) == Rational(1, 4));
}

TEST_CASE("brute field equals the naive oracle") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 3; ++t) {
    DyadicGrid g = DyadicGrid::cube(2, 3);
    StepFunction f = random_rational(g, rng);
    double r = t == 0 ? kNoTruncation : 0.2 + 0.25 * t;
    auto field = max_field_brute(f, BasisSpec::axis(2), r);
    for (std::size_t i = 0; i < g.cell_count(); ++i) REQUIRE(field.exact(i) == naive_field_at(f, 2, r, g.coord(i)));
  }
  DyadicGrid g3 = DyadicGrid::cube(3, 2);
  StepFunction f3 = random_rational(g3, rng);
  auto field3 = max_field_brute(f3, BasisSpec::axis(2), kNoTruncation);
  for (std::size_t i = 0; i < g3.cell_count(); ++i) REQUIRE(field3.exact(i) == naive_field_at(f3, 2, kNoTruncation, g3.coord(i)));
}

TEST_CASE("fast field is bit-identical to brute") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 10; ++t) {
    DyadicGrid g({3, 4});
    StepFunction f = random_rational(g, rng);
    double r = (t % 3 == 0) ? kNoTruncation : 0.15 + 0.1 * t;
    CHECK(fields_identical(max_field_fast(f, BasisSpec::axis(2), r), max_field_brute(f, BasisSpec::axis(2), r)));
  }
  DyadicGrid g3 = DyadicGrid::cube(3, 2);
  StepFunction f3 = random_rational(g3, rng);
  CHECK(fields_identical(max_field_fast(f3, BasisSpec::axis(2), kNoTruncation),
                         max_field_brute(f3, BasisSpec::axis(2), kNoTruncation)));
  CHECK(fields_identical(max_field_fast(f3, BasisSpec::axis(3), 0.9), max_field_brute(f3, BasisSpec::axis(3), 0.9)));

  GridSet single(DyadicGrid::cube(2, 4));
  single.set(37);
  auto fi = StepFunction::indicator(single, Rational(1), ValueMode::Rational);
  CHECK(fields_identical(max_field_fast(fi, BasisSpec::axis(2), 0.4), max_field_brute(fi, BasisSpec::axis(2), 0.4)));
}

TEST_CASE("double mode agrees with rational mode") {
  std::mt19937_64 rng(23);
  DyadicGrid g = DyadicGrid::cube(2, 4);
  StepFunction f = random_rational(g, rng);
  auto exact = max_field_fast(f, BasisSpec::axis(2), 0.5);
  auto approx = max_field_fast(f.with_mode(ValueMode::Double), BasisSpec::axis(2), 0.5);
  for (std::size_t i = 0; i < g.cell_count(); ++i) CHECK(approx.values[i] == doctest::Approx(exact.values[i]).epsilon(1e-12));
}

TEST_CASE("field properties") {
  std::mt19937_64 rng(24);
  DyadicGrid g = DyadicGrid::cube(2, 4);
  for (int t = 0; t < 5; ++t) {
    StepFunction f = random_rational(g, rng, 0.7);
    auto small = max_field_fast(f, BasisSpec::axis(2), 0.2);
    auto large = max_field_fast(f, BasisSpec::axis(2), 0.45);
    for (std::size_t i = 0; i < g.cell_count(); ++i) REQUIRE(small.exact(i) <= large.exact(i));

    auto scaled = max_field_fast(f.scaled(Rational(5, 2)), BasisSpec::axis(2), 0.45);
    for (std::size_t i = 0; i < g.cell_count(); ++i) REQUIRE(scaled.exact(i) == large.exact(i) * Rational(5, 2));
  }
}

TEST_CASE("level sets") {
  std::mt19937_64 rng(25);
  DyadicGrid g = DyadicGrid::cube(2, 4);
  GridSet e(g);
  for (int i = 0; i < 12; ++i) e.set(rng() % g.cell_count());
  auto f1 = max_field_fast(StepFunction::indicator(e, Rational(1), ValueMode::Rational), BasisSpec::axis(2), 0.5);
  auto f2 = max_field_fast(StepFunction::indicator(e, Rational(2), ValueMode::Rational), BasisSpec::axis(2), 0.5);
  CHECK(level_set(f2, Rational(1)) == level_set(f1, Rational(1, 2)));
  CHECK_FALSE(level_set(f1, Rational(0)).empty());
  CHECK(level_set(f1, Rational(1)).empty());
  CHECK(e.subset_of(level_set(f2, Rational(1))));
}

TEST_CASE("wrap mode is translation covariant") {
  std::mt19937_64 rng(26);
  DyadicGrid g({3, 3});
  StepFunction f = random_rational(g, rng);
  const std::int64_t sx = 3, sy = 5;
  StepFunction shifted(g, ValueMode::Rational);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    Coord c = g.coord(i);
    Coord d{(c[0] + sx) % 8, (c[1] + sy) % 8};
    shifted.set(g.index(d), f.rationals()[i]);
  }
  MaxFieldOptions wrap{true};
  auto a = max_field_fast(f, BasisSpec::axis(2), 0.6, wrap);
  auto b = max_field_fast(shifted, BasisSpec::axis(2), 0.6, wrap);
  CHECK(fields_identical(a, max_field_brute(f, BasisSpec::axis(2), 0.6, wrap)));
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    Coord c = g.coord(i);
    Coord d{(c[0] + sx) % 8, (c[1] + sy) % 8};
    REQUIRE(b.exact(g.index(d)) == a.exact(i));
  }
}

TEST_CASE("quarter-turn rotated bases reproduce the axis field") {
  std::mt19937_64 rng(27);
  DyadicGrid g = DyadicGrid::cube(2, 4);
  StepFunction f = random_rational(g, rng);
  auto axis = max_field_fast(f, BasisSpec::axis(2), 0.5);
  for (int q = 1; q < 4; ++q) {
    auto rot = max_field_fast(f, BasisSpec::rotated(q * std::numbers::pi / 2), 0.5);
    CHECK(rot.num == axis.num);
    CHECK(rot.area == axis.area);
  }
  // Rotating the function rotates the field.
  auto turned = max_field_fast(rotate_quarter(f, 1), BasisSpec::axis(2), 0.5);
  for (std::size_t i = 0; i < g.cell_count(); ++i) REQUIRE(turned.exact(rotate_cell(g, i, 1)) == axis.exact(i));
}

TEST_CASE("rotated averages") {
  DyadicGrid g = DyadicGrid::cube(2, 4);
  StepFunction one = StepFunction::from_doubles(g, std::vector<double>(g.cell_count(), 1.0));
  for (double gamma : {0.0, 0.3, std::numbers::pi / 4, 1.2})
    CHECK(rotated_average(one, {0.5, 0.5, 0.3, 0.2, gamma}) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(28);
  std::vector<double> v(g.cell_count());
  for (auto& x : v) x = static_cast<double>(rng() % 9);
  StepFunction f = StepFunction::from_doubles(g, v);
  StepFunction ft(g, ValueMode::Double);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    Coord c = g.coord(i);
    ft.set(g.index(std::vector<std::int64_t>{c[1], c[0]}), v[i]);
  }
  // Cell-aligned at gamma = 0 matches the rectangle sum exactly.
  FunctionIntegral ii(f);
  double axis_avg = ii.integral_double(AxisRect{{2, 5}, {7, 8}}) / (5.0 * 3.0 / 256.0);
  CHECK(rotated_average(f, {4.5 / 16, 6.5 / 16, 5.0 / 16, 3.0 / 16, 0.0}) == axis_avg);
  // A quarter turn equals the transposed rectangle on the transposed function.
  for (int t = 0; t < 20; ++t) {
    double cx = 0.1 + 0.8 * (rng() % 1000) / 1000.0, cy = 0.1 + 0.8 * (rng() % 1000) / 1000.0;
    double a = 0.05 + 0.3 * (rng() % 1000) / 1000.0, b = 0.05 + 0.3 * (rng() % 1000) / 1000.0;
    double rot = rotated_average(f, {cx, cy, a, b, std::numbers::pi / 2});
    double tr = rotated_average(ft, {cy, cx, a, b, 0.0});
    CHECK(rot == doctest::Approx(tr).epsilon(1e-12));
  }
}

TEST_CASE("rotated average against Monte Carlo") {
  DyadicGrid g = DyadicGrid::cube(2, 4);
  GridSet half(g);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    Coord c = g.coord(i);
    if (c[0] + c[1] < 16) half.set(i);
  }
  StepFunction f = StepFunction::indicator(half, Rational(1), ValueMode::Double);
  RotatedRect r{0.5, 0.47, 0.4, 0.4, std::numbers::pi / 4};
  double value = rotated_average(f, r);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const Rotation rot = Rotation::of(r.gamma);
  const int samples = 1000000;
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    double p = u(rng) * r.a, q = u(rng) * r.b;
    double x = r.cx + p * rot.c - q * rot.s, y = r.cy + p * rot.s + q * rot.c;
    if (x <= 0 || y <= 0 || x >= 1 || y >= 1) continue;
    auto i = static_cast<std::int64_t>(x * 16), j = static_cast<std::int64_t>(y * 16);
    if (half.test(static_cast<std::size_t>(i * 16 + j))) ++hits;
  }
  CHECK(std::abs(value - static_cast<double>(hits) / samples) < 1e-3);
}

TEST_CASE("sampled rotated level sets are certified") {
  DyadicGrid g = DyadicGrid::cube(2, 4);
  GridSet e(g);
  for (std::int64_t x = 6; x < 10; ++x)
    for (std::int64_t y = 6; y < 10; ++y)
      if (!((x == 6 || x == 9) && (y == 6 || y == 9))) e.set(g.index(std::vector<std::int64_t>{x, y}));
  // At gamma = 0 every certified cell lies in the exact axis level set.
  auto axis = level_set(max_field_fast(StepFunction::indicator(e, Rational(3), ValueMode::Rational), BasisSpec::axis(2),
                                       kNoTruncation),
                        Rational(1));
  auto lb = rotated_level_set(e, 3.0, 0.0, 100.0);
  CHECK(lb.set.subset_of(axis));
  CHECK(e.subset_of(lb.set));
  for (double gamma : {std::numbers::pi / 8, std::numbers::pi / 4, 3 * std::numbers::pi / 8}) {
    auto rot = rotated_level_set(e, 3.0, gamma, 100.0);
    CHECK(rot.set.count() > 0);
    CHECK(rot.certificates.size() == rot.set.count());
    for (const auto& [cell, rect] : rot.certificates) {
      CHECK(certify_rotated(e, 3.0, rect));
      std::int64_t x = static_cast<std::int64_t>(cell) / 16, y = static_cast<std::int64_t>(cell) % 16;
      std::int64_t first, last;
      cells_inside_column(rect, x, first, last);
      CHECK((first <= y && y < last));
    }
  }
}

TEST_CASE("rotated lower-bound field") {
  std::mt19937_64 rng(30);
  DyadicGrid g = DyadicGrid::cube(2, 3);
  StepFunction f = random_rational(g, rng).with_mode(ValueMode::Double);
  double fmax = *std::max_element(f.doubles().begin(), f.doubles().end());
  auto field = max_field_fast(f, BasisSpec::rotated(0.4), 0.6);
  CHECK(field.lower_bound);
  for (double v : field.values) {
    CHECK(v >= 0.0);
    CHECK(v <= fmax + 1e-12);
  }
}
