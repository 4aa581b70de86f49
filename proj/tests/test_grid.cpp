#include <doctest.h>

#include "resonance/errors.hpp"
#include "resonance/integral_image.hpp"
#include "resonance/serialize.hpp"

#include <random>
#include <sstream>

using namespace resonance;

namespace {

GridSet random_set(const DyadicGrid& g, std::mt19937_64& rng, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  GridSet s(g);
  for (std::size_t i = 0; i < g.cell_count(); ++i)
    if (coin(rng)) s.set(i);
  return s;
}

// Naive rectangle sum over a planar grid, clipped to the grid.
template <typename T>
T naive_sum(const std::vector<T>& v, std::int64_t n0, std::int64_t n1, const AxisRect& r) {
  T s{};
  for (std::int64_t i = std::max<std::int64_t>(0, r.lo[0]); i < std::min(n0, r.hi[0]); ++i)
    for (std::int64_t j = std::max<std::int64_t>(0, r.lo[1]); j < std::min(n1, r.hi[1]); ++j) s += v[i * n1 + j];
  return s;
}

}  // namespace

TEST_CASE("measure of simple sets") {
  DyadicGrid g = DyadicGrid::cube(2, 1);
  CHECK(GridSet(g).measure() == 0);
  CHECK(GridSet(g, true).measure() == 1);
  std::vector<std::size_t> cells{0, 1, 3};
  CHECK(GridSet::from_cells(g, cells).measure() == Rational(3, 4));
}

TEST_CASE("cell volume on a non-unit box") {
  DyadicGrid g({2, 1}, {Rational(0), Rational(0)}, {Rational(3), Rational(1, 2)});
  CHECK(g.cell_volume() == Rational(3, 4) * Rational(1, 4));
  CHECK(GridSet(g, true).measure() == g.box_volume());
}

TEST_CASE("uniform distribution check") {
  DyadicGrid fine = DyadicGrid::cube(2, 3);
  CHECK(uniform_distribution_check(GridSet(fine, true), {2, 2}));
  GridSet checker(fine);
  for (std::size_t i = 0; i < fine.cell_count(); ++i) {
    Coord c = fine.coord(i);
    if ((c[0] + c[1]) % 2 == 0) checker.set(i);
  }
  CHECK(uniform_distribution_check(checker, {2, 2}));
  GridSet single(fine);
  single.set(5);
  CHECK_FALSE(uniform_distribution_check(single, {1, 1}));
  CHECK_THROWS_AS(uniform_distribution_check(single, {4, 4}), InvalidArgument);
}

TEST_CASE("integral image basics") {
  DyadicGrid g = DyadicGrid::cube(2, 3);
  StepFunction one = StepFunction::from_rationals(g, std::vector<Rational>(g.cell_count(), Rational(1)));
  FunctionIntegral ii(one);
  CHECK(ii.integral(AxisRect{{0, 0}, {8, 8}}) == 1);
  GridSet cell(g);
  cell.set(g.index(std::vector<std::int64_t>{2, 5}));
  FunctionIntegral ic(StepFunction::indicator(cell, Rational(1), ValueMode::Rational));
  CHECK(ic.integral(AxisRect{{1, 3}, {4, 8}}) == g.cell_volume());
  CHECK(ic.integral(AxisRect{{-5, -5}, {20, 20}}) == g.cell_volume());
}

TEST_CASE("integral image equals naive summation on every rectangle") {
  std::mt19937_64 rng(11);
  SUBCASE("random 8x8 rational function") {
    DyadicGrid g = DyadicGrid::cube(2, 3);
    std::uniform_int_distribution<int> num(0, 30), den(1, 7);
    std::vector<Rational> v(g.cell_count());
    for (auto& x : v) x = Rational(num(rng), den(rng));
    FunctionIntegral ii(StepFunction::from_rationals(g, v));
    for (std::int64_t a = -1; a <= 8; ++a)
      for (std::int64_t b = a + 1; b <= 9; ++b)
        for (std::int64_t c = -1; c <= 8; ++c)
          for (std::int64_t d = c + 1; d <= 9; ++d) {
            AxisRect r{{a, c}, {b, d}};
            REQUIRE(ii.integral(r) == naive_sum(v, 8, 8, r) * g.cell_volume());
          }
  }
  SUBCASE("all grids up to 16x16, integer values") {
    for (int m0 = 0; m0 <= 4; ++m0)
      for (int m1 = 0; m1 <= 4; ++m1) {
        DyadicGrid g({m0, m1});
        std::uniform_int_distribution<std::int64_t> val(0, 1000);
        std::vector<std::int64_t> v(g.cell_count());
        for (auto& x : v) x = val(rng);
        IntegralImage<std::int64_t> ii(g, v);
        const auto n0 = g.cells_along(0), n1 = g.cells_along(1);
        for (std::int64_t a = 0; a < n0; ++a)
          for (std::int64_t b = a + 1; b <= n0; ++b)
            for (std::int64_t c = 0; c < n1; ++c)
              for (std::int64_t d = c + 1; d <= n1; ++d) {
                AxisRect r{{a, c}, {b, d}};
                REQUIRE(ii.sum(r) == naive_sum(v, n0, n1, r));
              }
      }
  }
  SUBCASE("three dimensions") {
    DyadicGrid g({2, 1, 3});
    std::vector<std::int64_t> v(g.cell_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<std::int64_t>(rng() % 17);
    IntegralImage<std::int64_t> ii(g, v);
    for (int t = 0; t < 500; ++t) {
      AxisRect r{{0, 0, 0}, {0, 0, 0}};
      for (int j = 0; j < 3; ++j) {
        auto n = g.cells_along(j);
        r.lo[j] = static_cast<std::int64_t>(rng() % (n + 2)) - 1;
        r.hi[j] = r.lo[j] + 1 + static_cast<std::int64_t>(rng() % (n + 1));
      }
      std::int64_t expect = 0;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (r.contains(g.coord(i))) expect += v[i];
      REQUIRE(ii.sum(r) == expect);
    }
  }
}

TEST_CASE("set algebra") {
  std::mt19937_64 rng(3);
  DyadicGrid g({3, 4});
  GridSet a = random_set(g, rng), b = random_set(g, rng);
  CHECK(intersection(a, GridSet(g, true)) == a);
  CHECK(intersection(a, complement(a)).empty());
  std::size_t oracle = 0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) oracle += (a.test(i) && b.test(i)) ? 1 : 0;
  CHECK(intersection_count(a, b) == oracle);
  CHECK(set_union(a, b).count() + intersection_count(a, b) == a.count() + b.count());
  CHECK_THROWS_AS(intersection(a, GridSet(DyadicGrid::cube(2, 3))), InvalidArgument);
}

TEST_CASE("measure is additive and refinement invariant") {
  std::mt19937_64 rng(5);
  DyadicGrid g({3, 2});
  for (int t = 0; t < 20; ++t) {
    GridSet a = random_set(g, rng, 0.3);
    GridSet b = difference(random_set(g, rng, 0.3), a);
    CHECK(measure(set_union(a, b)) == measure(a) + measure(b));
    DyadicGrid finer = g.refined({5, 4});
    GridSet fa = a.refined(finer);
    CHECK(fa.measure() == a.measure());
    CHECK(fa.coarsened(g) == a);
  }
}

TEST_CASE("step function integral and support") {
  DyadicGrid g = DyadicGrid::cube(2, 2);
  std::vector<Rational> v(16, Rational(0));
  v[3] = Rational(4);
  v[7] = Rational(1, 3);
  StepFunction f = StepFunction::from_rationals(g, v);
  CHECK(f.integral() == (Rational(4) + Rational(1, 3)) / 16);
  CHECK(f.support().count() == 2);
  CHECK(f.refined(g.refined({4, 4})).integral() == f.integral());
  CHECK_THROWS_AS(StepFunction::from_doubles(g, std::vector<double>(16, -1.0)), InvalidArgument);
}

TEST_CASE("text format round trip") {
  std::mt19937_64 rng(9);
  DyadicGrid g({2, 3});
  std::vector<Rational> v(g.cell_count());
  for (auto& x : v) x = Rational(static_cast<long>(rng() % 50), 1 + static_cast<long>(rng() % 9));
  StepFunction f = StepFunction::from_rationals(g, v);
  std::stringstream ss;
  write_step_function(ss, f, {"basis=axis k=2 gamma=0 r=inf mode=rational"});
  auto back = read_step_function(ss);
  CHECK(back.rationals() == f.rationals());

  GridSet s = random_set(g, rng);
  std::stringstream ss2;
  write_grid_set(ss2, s);
  CHECK(read_grid_set(ss2) == s);
}
