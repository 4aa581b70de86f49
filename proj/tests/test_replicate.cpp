#include <doctest.h>

#include "resonance/errors.hpp"
#include "resonance/max_field.hpp"
#include "resonance/replicate.hpp"

#include <cmath>

using namespace resonance;

namespace {

const GrowthFunction kPhi = GrowthFunction::llogl(2);

MPhiWitness ball_witness(const std::vector<double>& gammas, double side, double eps) {
  BallTemplate t;
  t.bits = 3;
  t.side = side;
  t.r_cells = 2;
  t.t = 1;
  t.mode = WitnessMode::ClipToQ;
  return mphi_witness_for_rotations(gammas, Rational(3), eps, t, kPhi);
}

GridSet checkerboard(int bits) {
  DyadicGrid g = DyadicGrid::cube(2, bits);
  GridSet s(g);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    Coord c = g.coord(i);
    if ((c[0] + c[1]) % 2 == 0) s.set(i);
  }
  return s;
}

}  // namespace

TEST_CASE("replicate: density equal to c(h) tiles every coarse cell") {
  auto w = ball_witness({0.0}, 0.25, 2.0);
  auto rep = replicate_configuration(w, w.c_h, 2);
  CHECK(rep.j == 5);
  CHECK(rep.tile == 8);
  CHECK(rep.e.normalized_measure() == w.c_h);
  CHECK(rep.e.count() == 12u * 16u);
  auto check = verify_replication(rep, w, w.c_h, 2);
  CHECK(check.ok());
  CHECK(uniform_distribution_check(rep.p[0], {2, 2}));
}

TEST_CASE("replicate: smaller delta rounds the tile up") {
  const Rational delta(1, 10);
  auto tpl = DyadicGrid::cube(2, 3);
  AxisRect q{{0, 0}, {8, 8}};
  Rational side = replication_template_side(tpl, q, Rational(3, 16), delta, 1);
  CHECK(side == Rational(1, 4));
  auto w = ball_witness({0.0, M_PI / 4}, 0.25, 2.0);
  auto rep = replicate_configuration(w, delta, 1);
  CHECK(rep.tile == 16);
  CHECK(rep.j == 5);
  const Rational me = rep.e.measure();
  CHECK(me <= delta);
  CHECK(me >= delta / 16);
  CHECK(verify_replication(rep, w, delta, 1).ok());
}

TEST_CASE("replicate: tiled level sets contain P (max-field oracle)") {
  auto w = ball_witness({0.0, M_PI / 2}, 0.5, 2.0);
  auto rep = replicate_configuration(w, w.c_h, 1);
  auto f = StepFunction::indicator(rep.e, w.h, ValueMode::Rational);
  for (std::size_t b = 0; b < rep.bases.size(); ++b) {
    auto oracle = level_set(max_field_fast(f, rep.bases[b], rep.truncation), Rational(1));
    CHECK(rep.p[b].subset_of(oracle));
  }
}

TEST_CASE("replicate: preconditions") {
  auto w = ball_witness({0.0}, 0.25, 2.0);
  CHECK_THROWS_AS(replicate_configuration(w, Rational(1, 4), 2), InvalidArgument);
  CHECK_THROWS_AS(replicate_configuration(w, Rational(0), 2), InvalidArgument);
  CHECK_THROWS_AS(replicate_configuration(w, w.c_h, 3), InvalidArgument);
  try {
    replicate_configuration(w, w.c_h, 2, 4);
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    CHECK(e.required_resolution() == 5);
  }
}

TEST_CASE("independence: full cube and checkerboards") {
  GridSet a = checkerboard(3);
  GridSet full(a.grid(), true);
  auto r1 = check_independence({a, full}, 2);
  CHECK(r1.all_hold());
  GridSet coarse = checkerboard(1).refined(DyadicGrid::cube(2, 3));
  auto r2 = check_independence({coarse, a}, 2);
  REQUIRE(r2.subsets.size() == 1);
  CHECK(r2.subsets[0].intersection == Rational(1, 4));
  CHECK(r2.all_hold());
  GridSet same = a;
  CHECK_FALSE(check_independence({a, same}, 2).all_hold());
}

TEST_CASE("independence: chained replications") {
  auto w1 = ball_witness({0.0}, 1.0, 2.0);
  auto r1 = replicate_configuration(w1, w1.c_h, 0);
  auto w2 = ball_witness({0.0}, 0.125, 1.0);
  auto r2 = replicate_configuration(w2, w2.c_h, r1.j);
  auto w3 = ball_witness({0.0}, 1.0 / 64, 2.0 / 3);
  auto r3 = replicate_configuration(w3, w3.c_h, r2.j);
  DyadicGrid fine = r3.grid;
  std::vector<GridSet> sets{r1.p[0].refined(fine), r2.p[0].refined(fine), r3.p[0]};
  auto rep = check_independence(sets, 3, {0, r1.j, r2.j}, {r1.j, r2.j, r3.j});
  CHECK(rep.chained);
  CHECK(rep.subsets.size() == 4);
  CHECK(rep.all_hold());
  auto broken = check_independence(sets, 3, {0, 0, r2.j}, {r1.j, r2.j, r3.j});
  CHECK_FALSE(broken.chained);
}
