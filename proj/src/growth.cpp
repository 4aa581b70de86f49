#include "resonance/growth.hpp"

#include "resonance/errors.hpp"

#include <algorithm>
#include <cmath>

namespace resonance {

GrowthFunction::GrowthFunction(std::string name, std::function<double(double)> fn, bool satisfies_delta2,
                               bool is_non_regular)
    : name_(std::move(name)), fn_(std::move(fn)), delta2_(satisfies_delta2), non_regular_(is_non_regular) {}

GrowthFunction GrowthFunction::llogl(int k) {
  if (k < 1) throw InvalidArgument("llogl exponent k must be >= 1");
  auto fn = [k](double t) { return t * std::pow(1.0 + std::max(0.0, std::log(t)), k - 1); };
  // Δ2 holds for every k; non-regular iff k >= 2.
  return GrowthFunction("t(1+ln+t)^" + std::to_string(k - 1), fn, true, k >= 2);
}

GrowthFunction GrowthFunction::power(double p) {
  if (!(p > 0)) throw InvalidArgument("power exponent must be > 0");
  return GrowthFunction("t^" + std::to_string(p), [p](double t) { return std::pow(t, p); }, true, p > 1);
}

GrowthFunction GrowthFunction::table(std::vector<std::pair<double, double>> points, bool satisfies_delta2,
                                     bool is_non_regular) {
  if (points.size() < 2) throw InvalidArgument("growth table needs at least two points");
  std::sort(points.begin(), points.end());
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].first == points[i - 1].first) throw InvalidArgument("duplicate t in growth table");
    if (points[i].second < points[i - 1].second) throw InvalidArgument("growth table is not monotone");
  }
  auto fn = [points](double t) {
    auto it = std::upper_bound(points.begin(), points.end(), t,
                               [](double x, const std::pair<double, double>& p) { return x < p.first; });
    std::size_t hi = it == points.begin() ? 1 : (it == points.end() ? points.size() - 1 : it - points.begin());
    const auto& a = points[hi - 1];
    const auto& b = points[hi];
    double v = a.second + (b.second - a.second) * (t - a.first) / (b.first - a.first);
    return std::max(v, 0.0);
  };
  return GrowthFunction("table", fn, satisfies_delta2, is_non_regular);
}

bool GrowthFunction::monotone_on(std::vector<double> samples) const {
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 1; i < samples.size(); ++i)
    if ((*this)(samples[i]) < (*this)(samples[i - 1])) return false;
  return true;
}

}  // namespace resonance
