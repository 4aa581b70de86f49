#include <doctest.h>

#include "resonance/errors.hpp"
#include "resonance/halo.hpp"
#include "resonance/max_field.hpp"

#include <cmath>
#include <random>

using namespace resonance;

namespace {

// Level-set size of h chi_S computed with the grid kernel on a window large
// enough to hold every qualifying rectangle.
std::uint64_t window_count(const std::vector<std::uint8_t>& mask, std::int64_t b0, std::int64_t b1, const Rational& h,
                           double rho, int bits) {
  DyadicGrid g = DyadicGrid::cube(2, bits);
  const std::int64_t N = g.cells_along(0);
  const std::int64_t o0 = (N - b0) / 2, o1 = (N - b1) / 2;
  GridSet s(g);
  for (std::int64_t i = 0; i < b0; ++i)
    for (std::int64_t j = 0; j < b1; ++j)
      if (mask[i * b1 + j]) s.set(g.index(std::vector<std::int64_t>{o0 + i, o1 + j}));
  auto f = StepFunction::indicator(s, h, ValueMode::Rational);
  double r = std::isinf(rho) ? rho : rho / static_cast<double>(N);
  return level_set(max_field_fast(f, BasisSpec::axis(2), r), Rational(1)).count();
}

}  // namespace

TEST_CASE("discrete ball") {
  auto cells = ball_cells(2.0);
  CHECK(cells.size() == 12);
  DyadicGrid g = DyadicGrid::cube(2, 3);
  CHECK(discrete_ball(g, {4, 4}, 2.0).count() == 12);
  CHECK(discrete_ball(g, {4, 4}, 1.0).count() == 4);
}

TEST_CASE("lattice level-set counter matches the grid kernel") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 30; ++t) {
    const std::int64_t b0 = 1 + static_cast<std::int64_t>(rng() % 4), b1 = 1 + static_cast<std::int64_t>(rng() % 4);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(b0 * b1));
    for (auto& c : mask) c = (rng() % 3) != 0;
    mask[0] = 1;
    const bool unbounded = t % 5 == 0;
    // Without truncation every qualifying rectangle has area < 3 * 16, so a
    // window radius of 48 cells suffices.
    const Rational h = unbounded ? Rational(3) : Rational(static_cast<long>(3 + rng() % 10), static_cast<long>(1 + rng() % 3));
    const double rho = unbounded ? kNoTruncation : 1.5 + static_cast<double>(rng() % 12);
    const auto lattice = strong_level_set_count(mask, b0, b1, h, rho);
    REQUIRE(lattice == window_count(mask, b0, b1, h, unbounded ? 49.0 : rho, unbounded ? 7 : 6));
  }
}

TEST_CASE("halo estimate basics") {
  HaloProbe probe;
  probe.h = 1.0;
  CHECK_THROWS_AS(halo_estimate(probe, {2.0}, {4.0}), InvalidArgument);
  probe.h = 1.0 + 1e-9;
  auto est = halo_estimate(probe, {2.0, 4.0}, {4.0, 6.0});
  CHECK(est.phi_hat >= 1.0);
  for (const auto& s : est.samples) CHECK(est.phi_hat >= s.ratio);
  probe.h = 8.0;
  CHECK_THROWS_AS(halo_estimate(probe, {2.0}, {0.5}), InvalidArgument);
}

TEST_CASE("halo estimate is monotone in h and dominates the weak variant") {
  HaloProbe probe;
  double prev = 0.0;
  for (double h : {2.0, 4.0, 8.0, 16.0}) {
    probe.h = h;
    auto est = halo_estimate(probe, {2.0, 4.0, 8.0, 16.0}, {3.0, 5.0});
    CHECK(est.phi_hat >= prev);
    prev = est.phi_hat;
    std::vector<double> lattice{2.0, 4.0, 8.0, 16.0};
    if (std::find(lattice.begin(), lattice.end(), h) != lattice.end()) {
      auto weak = halo_estimate(probe, {}, {3.0, 5.0}, true);
      CHECK(weak.phi_hat <= est.phi_hat);
    }
  }
}

TEST_CASE("window path agrees with the lattice counter for the strong basis") {
  HaloProbe lattice;
  lattice.h = 6.0;
  auto a = halo_estimate(lattice, {3.0}, {3.0});
  HaloProbe window = lattice;
  window.basis = BasisSpec::axis(3);  // n = 2: I_2^3 is the same family
  window.n = 2;
  auto b = halo_estimate(window, {3.0}, {3.0});
  CHECK(a.samples[0].level_cells == b.samples[0].level_cells);
}

TEST_CASE("halo fit") {
  std::vector<double> h{4, 8, 16, 32};
  std::vector<double> phi;
  for (double x : h) phi.push_back(x * (1 + std::log(x)));
  auto [lo, hi] = halo_fit(h, phi, 1);
  CHECK(lo == doctest::Approx(1.0));
  CHECK(hi == doctest::Approx(1.0));
  for (auto& p : phi) p *= 2;
  auto [lo2, hi2] = halo_fit(h, phi, 1);
  CHECK(lo2 == doctest::Approx(2.0));
  CHECK(hi2 == doctest::Approx(2.0));
  CHECK_THROWS_AS(halo_fit({4, 8}, {1, 2}, 1), InvalidArgument);
  CHECK_THROWS_AS(halo_fit({4, 8, 16}, {1, 0, 2}, 1), InvalidArgument);
}
