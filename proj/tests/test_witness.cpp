#include <doctest.h>

#include "resonance/errors.hpp"
#include "resonance/halo.hpp"
#include "resonance/max_field.hpp"
#include "resonance/witness.hpp"

#include <cmath>

using namespace resonance;

namespace {

const GrowthFunction kPhi = GrowthFunction::llogl(2);

BallTemplate clip_template() {
  BallTemplate t;
  t.bits = 3;
  t.side = 1.0;
  t.r_cells = 2;
  t.t = 1;
  t.mode = WitnessMode::ClipToQ;
  return t;
}

}  // namespace

TEST_CASE("witness: single rotation reduces to the axis basis") {
  auto w = mphi_witness_for_rotations({0.0}, Rational(3), 2.0, clip_template(), kPhi);
  REQUIRE(w.levels.size() == 1);
  CHECK(w.levels[0].exact);
  auto check = verify_witness(w);
  CHECK(check.ok());
  CHECK(w.e.count() == 12);
  CHECK(w.c_h == Rational(3, 16));

  // Same level set as the axis family computed directly.
  auto f = StepFunction::indicator(w.e, w.h, ValueMode::Rational);
  auto axis = level_set(max_field_fast(f, BasisSpec::axis(2), w.truncation), Rational(1));
  CHECK(w.levels[0].set == intersection(axis, GridSet::from_rect(w.grid, w.q)));
}

TEST_CASE("witness: quarter turn gives coordinate images") {
  auto w = mphi_witness_for_rotations({0.0, M_PI / 2}, Rational(3), 2.0, clip_template(), kPhi);
  CHECK(verify_witness(w).ok());
  CHECK(rotate_quarter(w.levels[0].set, 1) == w.levels[1].set);
}

TEST_CASE("witness: four rotations in clip mode") {
  auto w = mphi_witness_for_rotations({0.0, M_PI / 8, M_PI / 4, 3 * M_PI / 8}, Rational(3), 2.0, clip_template(),
                                      kPhi);
  auto check = verify_witness(w);
  CHECK(check.ok());
  for (const auto& lv : w.levels) CHECK(lv.set.count() >= 48);
  CHECK_FALSE(w.levels[1].exact);
  CHECK(w.c > 0);
}

TEST_CASE("witness: tampered certificates are rejected") {
  auto w = mphi_witness_for_rotations({0.0, M_PI / 4}, Rational(3), 2.0, clip_template(), kPhi);
  auto bad = w;
  bad.levels[1].rotated.front().rect.a *= 4;
  bad.levels[1].rotated.front().rect.b *= 4;
  CHECK_FALSE(verify_witness(bad).contained);
  auto thin = w;
  thin.levels[0].axis.pop_back();
  CHECK_FALSE(verify_witness(thin).contained);
  CHECK_FALSE(verify_witness(w, 10.0).mass);
  CHECK_FALSE(verify_witness(w, -1.0, Rational(1, 2)).density);
}

TEST_CASE("witness: preconditions") {
  auto tpl = clip_template();
  CHECK_THROWS_AS(mphi_witness_for_rotations({}, Rational(3), 2.0, tpl, kPhi), InvalidArgument);
  CHECK_THROWS_AS(mphi_witness_for_rotations({0.0}, Rational(3), 1.0, tpl, kPhi), InvalidArgument);
  CHECK_THROWS_AS(mphi_witness_for_rotations({0.0}, Rational(1), 2.0, tpl, kPhi), InvalidArgument);
  tpl.t = 3;
  CHECK_THROWS_AS(mphi_witness_for_rotations({0.0}, Rational(3), 2.0, tpl, kPhi), InvalidArgument);
}

TEST_CASE("witness: coarse template rejects a lossy rotation") {
  auto tpl = clip_template();
  tpl.mode = WitnessMode::Faithful;
  try {
    mphi_witness_for_rotations({0.0, M_PI / 4}, Rational(3), 2.0, tpl, kPhi);
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    CHECK(e.required_resolution() == 4);
  }
}

TEST_CASE("witness: faithful rotations at h = 64 against the halo estimate") {
  BallTemplate tpl;
  tpl.bits = 5;
  tpl.side = 1.0;
  tpl.r_cells = 4;
  tpl.t = 3;
  tpl.mode = WitnessMode::Faithful;
  auto w = mphi_witness_for_rotations({0.0, M_PI / 8, M_PI / 4, 3 * M_PI / 8}, Rational(64), 2.0, tpl, kPhi);
  CHECK(verify_witness(w).ok());

  HaloProbe probe;
  probe.h = 64;
  probe.grid_bits = 5;
  auto est = halo_estimate(probe, {3.0}, {4.0});
  const double bound = 0.25 * est.phi_hat * static_cast<double>(w.e.count());
  for (const auto& lv : w.levels) CHECK(static_cast<double>(lv.set.count()) >= bound);
  CHECK(w.c_h_reference == doctest::Approx(1.0 / 128));
}
