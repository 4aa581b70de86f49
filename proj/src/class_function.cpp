#include "resonance/class_function.hpp"

#include "resonance/errors.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace resonance {

ClassFunction::ClassFunction(DyadicGrid g, const Rational& fill)
    : grid(std::move(g)), values{fill}, cls(grid.cell_count(), 0) {}

ClassFunction ClassFunction::from_step(const StepFunction& f, const DyadicGrid& finer) {
  std::map<Rational, std::uint16_t> index;
  for (std::size_t i = 0; i < f.size(); ++i) index.emplace(f.exact(i), 0);
  if (index.size() > std::numeric_limits<std::uint16_t>::max()) throw InvalidArgument("too many distinct values");
  ClassFunction out;
  out.grid = finer;
  for (auto& [v, c] : index) {
    c = static_cast<std::uint16_t>(out.values.size());
    out.values.push_back(v);
  }
  std::vector<std::uint16_t> coarse(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) coarse[i] = index.at(f.exact(i));
  out.cls.resize(finer.cell_count());
  if (finer == f.grid()) {
    out.cls = coarse;
  } else {
    for (std::size_t i = 0; i < out.cls.size(); ++i) out.cls[i] = coarse[parent_cell(finer, f.grid(), i)];
  }
  return out;
}

std::uint16_t ClassFunction::class_of(const Rational& v) {
  for (std::size_t c = 0; c < values.size(); ++c)
    if (values[c] == v) return static_cast<std::uint16_t>(c);
  if (values.size() >= std::numeric_limits<std::uint16_t>::max()) throw InvalidArgument("too many distinct values");
  values.push_back(v);
  return static_cast<std::uint16_t>(values.size() - 1);
}

std::vector<std::uint64_t> ClassFunction::histogram() const {
  std::vector<std::uint64_t> h(values.size(), 0);
  for (auto c : cls) ++h[c];
  return h;
}

std::vector<std::pair<Rational, std::uint64_t>> ClassFunction::value_histogram() const {
  std::map<Rational, std::uint64_t> m;
  auto h = histogram();
  for (std::size_t c = 0; c < values.size(); ++c)
    if (h[c] > 0) m[values[c]] += h[c];
  return {m.begin(), m.end()};
}

Rational ClassFunction::integral() const {
  auto h = histogram();
  Rational total(0);
  for (std::size_t c = 0; c < values.size(); ++c) total += values[c] * h[c];
  return total * grid.cell_volume();
}

StepFunction ClassFunction::to_step_function() const {
  std::vector<Rational> v(cls.size());
  for (std::size_t i = 0; i < cls.size(); ++i) v[i] = values[cls[i]];
  return StepFunction::from_rationals(grid, std::move(v));
}

}  // namespace resonance
