#include "resonance/lemmas.hpp"

#include "resonance/errors.hpp"
#include "resonance/halo.hpp"
#include "resonance/max_field.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>

namespace resonance {

namespace {

double integrate(const std::function<double(double)>& fn, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, a, b, 4, tol, &err);
  if (!(err <= std::sqrt(tol) * std::abs(v) || err <= tol)) throw ConvergenceError("quadrature did not converge");
  return v;
}

// ∫ over {x_j > delta_j (j >= first), prod x_j < bound} of 1 / prod x_j.
double nested(const std::vector<double>& delta, std::size_t first, double bound, double tol) {
  if (first + 1 == delta.size()) return bound > delta[first] ? std::log(bound / delta[first]) : 0.0;
  double rest = 1.0;
  for (std::size_t j = first + 1; j < delta.size(); ++j) rest *= delta[j];
  const double upper = bound / rest;
  if (!(upper > delta[first])) return 0.0;
  // dx / x = ds under x = delta e^s.
  const double d = delta[first];
  return integrate([&](double s) { return nested(delta, first + 1, bound / (d * std::exp(s)), tol); }, 0.0,
                   std::log(upper / d), tol);
}

}  // namespace

double lemma9_integral(int n, const std::vector<double>& delta, double h, double tol) {
  if (n < 1 || static_cast<int>(delta.size()) != n) throw InvalidArgument("lemma9 needs n >= 1 and n deltas");
  if (!(h > 1)) throw InvalidArgument("lemma9 needs h > 1");
  for (double d : delta)
    if (!(d > 0)) throw InvalidArgument("lemma9 needs delta_j > 0");
  if (n == 1) return std::log(h);
  double prod = 1.0;
  for (double d : delta) prod *= d;
  return nested(delta, 0, h * prod, tol);
}

double lemma9_closed_form(int n, double h) { return std::pow(std::log(h), n) / std::tgamma(n + 1.0); }

double lemma10_region_ratio(int n, int k, double h) {
  if (k < 1 || k > n) throw InvalidArgument("lemma10 needs 1 <= k <= n");
  const int p = n - k;
  const double fact = std::tgamma(static_cast<double>(k));
  // w = e^s.
  auto fn = [&](double s) {
    const double w = std::exp(s);
    double outer = p == 0 ? 1.0 : std::pow(std::pow(h / w, 1.0 / p) - 1.0, p);
    return outer * std::pow(s, k - 1) / fact * w;
  };
  return integrate(fn, 0.0, std::log(h), 1e-12);
}

Lemma10Result lemma10_levelset_measure(const AxisRect& interval, double h, int k, const DyadicGrid& grid) {
  const int n = grid.dim();
  if (interval.dim() != n || !interval.valid()) throw InvalidArgument("interval does not match the grid");
  if (k < 1 || k > n) throw InvalidArgument("lemma10 needs 1 <= k <= n");
  if (!(h > std::ldexp(1.0, n))) throw InvalidArgument("lemma10 needs h > 2^n");
  for (int j = k; j < n; ++j)
    if (grid.cell_length(j) * interval.width(j) != grid.cell_length(k - 1) * interval.width(k - 1))
      throw InvalidArgument("interval edges k..n must have equal lengths");

  Lemma10Result out;
  const Rational hr = rational_from_double(h);
  const Rational vol_i = grid.cell_volume() * interval.cell_count();
  if (n == 2 && k == 2) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(interval.cell_count()), 1);
    auto cells = strong_level_set_count(mask, interval.width(0), interval.width(1), hr, kNoTruncation);
    out.measure = grid.cell_volume() * Rational(cells);
    out.lattice = true;
  } else {
    for (int j = 0; j < n; ++j) {
      double reach = static_cast<double>(interval.lo[j]) + h * static_cast<double>(interval.width(j));
      if (interval.lo[j] < 0 || reach > static_cast<double>(grid.cells_along(j)))
        throw InvalidArgument("grid too small to contain the level-set region");
    }
    GridSet s = GridSet::from_rect(grid, interval);
    auto f = StepFunction::indicator(s, hr, ValueMode::Rational);
    out.measure = level_set(max_field_fast(f, BasisSpec::axis(k), kNoTruncation), Rational(1)).measure();
  }
  const double m = to_double(out.measure), vi = to_double(vol_i), L = std::log(h);
  out.ratio_k = m / (h * std::pow(L, k) * vi);
  out.ratio_k_minus_1 = m / (h * std::pow(L, k - 1) * vi);
  out.ratio_model = m / (h * std::pow(1 + L, k - 1) * vi);
  out.region_measure = lemma10_region_ratio(n, k, h) * vi;
  return out;
}

Lemma10Fit lemma10_fit(const AxisRect& interval, const std::vector<double>& hs, int k, const DyadicGrid& grid) {
  if (hs.size() < 2) throw InvalidArgument("lemma10 fit needs at least two amplitudes");
  const double vi = to_double(grid.cell_volume() * interval.cell_count());
  std::vector<double> phi;
  for (double h : hs) phi.push_back(to_double(lemma10_levelset_measure(interval, h, k, grid).measure) / vi);
  Lemma10Fit fit;
  fit.slope = loglog_slope(hs, phi);
  fit.exponent = std::abs(fit.slope - k) <= std::abs(fit.slope - (k - 1)) ? k : k - 1;
  return fit;
}

}  // namespace resonance
