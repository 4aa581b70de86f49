#include "resonance/grid.hpp"

#include "resonance/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace resonance {

DyadicGrid::DyadicGrid(std::vector<int> m)
    : m_(std::move(m)), origin_(m_.size(), Rational(0)), sides_(m_.size(), Rational(1)) {
  init();
}

DyadicGrid::DyadicGrid(std::vector<int> m, std::vector<Rational> origin, std::vector<Rational> sides)
    : m_(std::move(m)), origin_(std::move(origin)), sides_(std::move(sides)) {
  if (origin_.size() != m_.size() || sides_.size() != m_.size())
    throw InvalidArgument("grid origin/sides must match the dimension");
  for (const auto& s : sides_)
    if (s <= 0) throw InvalidArgument("grid side lengths must be positive");
  init();
}

DyadicGrid DyadicGrid::cube(int n, int bits) { return DyadicGrid(std::vector<int>(n, bits)); }

void DyadicGrid::init() {
  if (m_.empty()) throw InvalidArgument("grid dimension must be at least 1");
  counts_.resize(m_.size());
  strides_.resize(m_.size());
  int total_bits = 0;
  for (std::size_t j = 0; j < m_.size(); ++j) {
    if (m_[j] < 0 || m_[j] > 30) throw InvalidArgument("grid resolution exponent out of range [0,30]");
    counts_[j] = std::int64_t{1} << m_[j];
    total_bits += m_[j];
  }
  if (total_bits > 40) throw InvalidArgument("grid has more than 2^40 cells");
  std::size_t stride = 1;
  for (int j = dim() - 1; j >= 0; --j) {
    strides_[j] = stride;
    stride *= static_cast<std::size_t>(counts_[j]);
  }
  total_ = stride;
}

Rational DyadicGrid::cell_length(int axis) const { return sides_[axis] * pow2(-m_[axis]); }

Rational DyadicGrid::cell_volume() const {
  Rational v(1);
  for (int j = 0; j < dim(); ++j) v *= cell_length(j);
  return v;
}

Rational DyadicGrid::box_volume() const {
  Rational v(1);
  for (const auto& s : sides_) v *= s;
  return v;
}

bool DyadicGrid::is_unit_cube() const {
  return std::all_of(origin_.begin(), origin_.end(), [](const Rational& o) { return o == 0; }) &&
         std::all_of(sides_.begin(), sides_.end(), [](const Rational& s) { return s == 1; });
}

std::size_t DyadicGrid::index(std::span<const std::int64_t> c) const {
  std::size_t idx = 0;
  for (int j = 0; j < dim(); ++j) idx += static_cast<std::size_t>(c[j]) * strides_[j];
  return idx;
}

Coord DyadicGrid::coord(std::size_t index) const {
  Coord c(m_.size());
  for (int j = 0; j < dim(); ++j) {
    c[j] = static_cast<std::int64_t>(index / strides_[j]);
    index %= strides_[j];
  }
  return c;
}

bool DyadicGrid::in_range(std::span<const std::int64_t> c) const {
  for (int j = 0; j < dim(); ++j)
    if (c[j] < 0 || c[j] >= counts_[j]) return false;
  return true;
}

Rational DyadicGrid::cell_center(int axis, std::int64_t i) const {
  return origin_[axis] + cell_length(axis) * (Rational(2 * i + 1) / 2);
}

DyadicGrid DyadicGrid::refined(const std::vector<int>& m) const {
  if (static_cast<int>(m.size()) != dim()) throw InvalidArgument("refinement dimension mismatch");
  for (int j = 0; j < dim(); ++j)
    if (m[j] < m_[j]) throw InvalidArgument("refinement must not coarsen");
  return DyadicGrid(m, origin_, sides_);
}

bool DyadicGrid::operator==(const DyadicGrid& other) const {
  return m_ == other.m_ && origin_ == other.origin_ && sides_ == other.sides_;
}

std::string DyadicGrid::describe() const {
  std::ostringstream os;
  os << "grid(n=" << dim() << ", m=[";
  for (int j = 0; j < dim(); ++j) os << (j ? "," : "") << m_[j];
  os << "])";
  return os.str();
}

std::int64_t AxisRect::cell_count() const {
  std::int64_t v = 1;
  for (int j = 0; j < dim(); ++j) v *= width(j);
  return v;
}

bool AxisRect::contains(std::span<const std::int64_t> c) const {
  for (int j = 0; j < dim(); ++j)
    if (c[j] < lo[j] || c[j] >= hi[j]) return false;
  return true;
}

Rational AxisRect::diameter_squared(const DyadicGrid& grid) const {
  Rational d(0);
  for (int j = 0; j < dim(); ++j) {
    Rational len = grid.cell_length(j) * width(j);
    d += len * len;
  }
  return d;
}

AxisRect AxisRect::translated(std::span<const std::int64_t> offset) const {
  AxisRect r = *this;
  for (int j = 0; j < dim(); ++j) {
    r.lo[j] += offset[j];
    r.hi[j] += offset[j];
  }
  return r;
}

bool AxisRect::valid() const {
  if (lo.size() != hi.size() || lo.empty()) return false;
  for (int j = 0; j < dim(); ++j)
    if (lo[j] >= hi[j]) return false;
  return true;
}

GridSet::GridSet(DyadicGrid grid, bool full) : grid_(std::move(grid)) {
  words_.assign((grid_.cell_count() + 63) / 64, full ? ~std::uint64_t{0} : 0);
  if (full && grid_.cell_count() % 64) words_.back() = (std::uint64_t{1} << (grid_.cell_count() % 64)) - 1;
}

GridSet GridSet::from_cells(const DyadicGrid& grid, std::span<const std::size_t> cells) {
  GridSet s(grid);
  for (auto c : cells) {
    if (c >= grid.cell_count()) throw InvalidArgument("cell index out of range");
    s.set(c);
  }
  return s;
}

GridSet GridSet::from_rect(const DyadicGrid& grid, const AxisRect& rect) {
  GridSet s(grid);
  const int n = grid.dim();
  Coord lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    lo[j] = std::clamp<std::int64_t>(rect.lo[j], 0, grid.cells_along(j));
    hi[j] = std::clamp<std::int64_t>(rect.hi[j], 0, grid.cells_along(j));
    if (lo[j] >= hi[j]) return s;
  }
  Coord c = lo;
  while (true) {
    s.set(grid.index(c));
    int j = n - 1;
    while (j >= 0 && ++c[j] == hi[j]) {
      c[j] = lo[j];
      --j;
    }
    if (j < 0) break;
  }
  return s;
}

std::size_t GridSet::count() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

Rational GridSet::measure() const { return grid_.cell_volume() * Rational(count()); }

Rational GridSet::normalized_measure() const {
  return Rational(BigInt(count()), BigInt(grid_.cell_count()));
}

std::vector<std::size_t> GridSet::cells() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    auto bits = words_[w];
    while (bits) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

void GridSet::for_each(const std::function<void(std::size_t)>& fn) const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    auto bits = words_[w];
    while (bits) {
      fn(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
}

std::size_t parent_cell(const DyadicGrid& fine, const DyadicGrid& coarse, std::size_t fine_index) {
  std::size_t idx = 0;
  const auto& fs = fine.strides();
  const auto& cs = coarse.strides();
  for (int j = 0; j < fine.dim(); ++j) {
    auto c = static_cast<std::int64_t>(fine_index / fs[j]);
    fine_index %= fs[j];
    idx += static_cast<std::size_t>(c >> (fine.resolution()[j] - coarse.resolution()[j])) * cs[j];
  }
  return idx;
}

namespace {

void require_nested(const DyadicGrid& coarse, const DyadicGrid& fine) {
  if (coarse.dim() != fine.dim() || coarse.origin() != fine.origin() || coarse.sides() != fine.sides())
    throw InvalidArgument("grids cover different boxes");
  for (int j = 0; j < coarse.dim(); ++j)
    if (coarse.resolution()[j] > fine.resolution()[j])
      throw InvalidArgument("resolution mismatch: " + coarse.describe() + " is not coarser than " +
                            fine.describe());
}

void require_same(const GridSet& a, const GridSet& b) {
  if (a.grid() != b.grid())
    throw InvalidArgument("grid mismatch: " + a.grid().describe() + " vs " + b.grid().describe());
}

}  // namespace

GridSet GridSet::refined(const DyadicGrid& finer) const {
  require_nested(grid_, finer);
  if (finer == grid_) return *this;
  GridSet out(finer);
  const std::size_t total = finer.cell_count();
  for (std::size_t i = 0; i < total; ++i)
    if (test(parent_cell(finer, grid_, i))) out.set(i);
  return out;
}

GridSet GridSet::coarsened(const DyadicGrid& coarser, bool require_exact) const {
  require_nested(coarser, grid_);
  std::vector<std::uint32_t> hits(coarser.cell_count(), 0);
  for_each([&](std::size_t i) { ++hits[parent_cell(grid_, coarser, i)]; });
  std::size_t per_cell = grid_.cell_count() / coarser.cell_count();
  GridSet out(coarser);
  for (std::size_t c = 0; c < hits.size(); ++c) {
    if (hits[c] == per_cell)
      out.set(c);
    else if (hits[c] != 0 && require_exact)
      throw InvalidArgument("set is not a union of cells at " + coarser.describe());
  }
  return out;
}

bool GridSet::subset_of(const GridSet& other) const {
  require_same(*this, other);
  for (std::size_t w = 0; w < words_.size(); ++w)
    if (words_[w] & ~other.words_[w]) return false;
  return true;
}

bool GridSet::operator==(const GridSet& other) const {
  return grid_ == other.grid_ && words_ == other.words_;
}

GridSet intersection(const GridSet& a, const GridSet& b) {
  require_same(a, b);
  GridSet out = a;
  for (std::size_t w = 0; w < out.words().size(); ++w) out.words()[w] &= b.words()[w];
  return out;
}

GridSet set_union(const GridSet& a, const GridSet& b) {
  require_same(a, b);
  GridSet out = a;
  for (std::size_t w = 0; w < out.words().size(); ++w) out.words()[w] |= b.words()[w];
  return out;
}

GridSet complement(const GridSet& a) {
  GridSet full(a.grid(), true);
  GridSet out = a;
  for (std::size_t w = 0; w < out.words().size(); ++w) out.words()[w] = ~out.words()[w] & full.words()[w];
  return out;
}

GridSet difference(const GridSet& a, const GridSet& b) {
  require_same(a, b);
  GridSet out = a;
  for (std::size_t w = 0; w < out.words().size(); ++w) out.words()[w] &= ~b.words()[w];
  return out;
}

std::size_t intersection_count(const GridSet& a, const GridSet& b) {
  require_same(a, b);
  std::size_t total = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w)
    total += static_cast<std::size_t>(std::popcount(a.words()[w] & b.words()[w]));
  return total;
}

Rational measure(const GridSet& s) { return s.measure(); }

bool uniform_distribution_check(const GridSet& s, const std::vector<int>& coarse) {
  const auto& grid = s.grid();
  if (static_cast<int>(coarse.size()) != grid.dim())
    throw InvalidArgument("coarse resolution has wrong dimension");
  for (int j = 0; j < grid.dim(); ++j)
    if (coarse[j] < 0 || coarse[j] > grid.resolution()[j])
      throw InvalidArgument("resolution mismatch: coarse resolution exceeds the set's grid");
  DyadicGrid coarse_grid(coarse, grid.origin(), grid.sides());
  std::vector<std::uint64_t> hits(coarse_grid.cell_count(), 0);
  s.for_each([&](std::size_t i) { ++hits[parent_cell(grid, coarse_grid, i)]; });
  // |s ∩ Q| / |box| == (|s| / |box|) (|Q| / |box|)  <=>  hits[Q] * #coarse == #s
  const std::uint64_t total = s.count();
  const std::uint64_t coarse_cells = coarse_grid.cell_count();
  return std::all_of(hits.begin(), hits.end(),
                     [&](std::uint64_t h) { return h * coarse_cells == total; });
}

StepFunction::StepFunction(DyadicGrid grid, ValueMode mode) : grid_(std::move(grid)), mode_(mode) {
  doubles_.assign(grid_.cell_count(), 0.0);
  if (mode_ == ValueMode::Rational) rationals_.assign(grid_.cell_count(), Rational(0));
}

StepFunction StepFunction::from_doubles(DyadicGrid grid, std::vector<double> values) {
  if (values.size() != grid.cell_count()) throw InvalidArgument("value count does not match grid");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("step function values must be finite and >= 0");
  StepFunction f(std::move(grid), ValueMode::Double);
  f.doubles_ = std::move(values);
  return f;
}

StepFunction StepFunction::from_rationals(DyadicGrid grid, std::vector<Rational> values) {
  if (values.size() != grid.cell_count()) throw InvalidArgument("value count does not match grid");
  StepFunction f(std::move(grid), ValueMode::Rational);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw InvalidArgument("step function values must be >= 0");
    f.doubles_[i] = to_double(values[i]);
  }
  f.rationals_ = std::move(values);
  return f;
}

StepFunction StepFunction::indicator(const GridSet& s, const Rational& amplitude, ValueMode mode) {
  if (amplitude < 0) throw InvalidArgument("amplitude must be >= 0");
  StepFunction f(s.grid(), mode);
  s.for_each([&](std::size_t i) { f.set(i, amplitude); });
  return f;
}

Rational StepFunction::exact(std::size_t i) const {
  return mode_ == ValueMode::Rational ? rationals_[i] : rational_from_double(doubles_[i]);
}

void StepFunction::set(std::size_t i, const Rational& v) {
  if (v < 0) throw InvalidArgument("step function values must be >= 0");
  doubles_[i] = to_double(v);
  if (mode_ == ValueMode::Rational) rationals_[i] = v;
}

void StepFunction::set(std::size_t i, double v) {
  if (!(v >= 0.0)) throw InvalidArgument("step function values must be >= 0");
  doubles_[i] = v;
  if (mode_ == ValueMode::Rational) rationals_[i] = rational_from_double(v);
}

Rational StepFunction::integral() const {
  Rational sum(0);
  if (mode_ == ValueMode::Rational) {
    for (const auto& v : rationals_) sum += v;
  } else {
    for (double v : doubles_)
      if (v != 0.0) sum += rational_from_double(v);
  }
  return sum * grid_.cell_volume();
}

GridSet StepFunction::support() const {
  GridSet s(grid_);
  for (std::size_t i = 0; i < doubles_.size(); ++i)
    if (mode_ == ValueMode::Rational ? rationals_[i] != 0 : doubles_[i] != 0.0) s.set(i);
  return s;
}

StepFunction StepFunction::scaled(const Rational& c) const {
  if (c < 0) throw InvalidArgument("scale must be >= 0");
  StepFunction out(grid_, mode_);
  double cd = to_double(c);
  for (std::size_t i = 0; i < doubles_.size(); ++i) {
    if (mode_ == ValueMode::Rational)
      out.set(i, rationals_[i] * c);
    else
      out.doubles_[i] = doubles_[i] * cd;
  }
  return out;
}

StepFunction StepFunction::refined(const DyadicGrid& finer) const {
  require_nested(grid_, finer);
  StepFunction out(finer, mode_);
  for (std::size_t i = 0; i < finer.cell_count(); ++i) {
    auto p = parent_cell(finer, grid_, i);
    out.doubles_[i] = doubles_[p];
    if (mode_ == ValueMode::Rational) out.rationals_[i] = rationals_[p];
  }
  return out;
}

StepFunction StepFunction::with_mode(ValueMode mode) const {
  if (mode == mode_) return *this;
  StepFunction out(grid_, mode);
  for (std::size_t i = 0; i < doubles_.size(); ++i) {
    if (mode == ValueMode::Rational)
      out.set(i, rational_from_double(doubles_[i]));
    else
      out.doubles_[i] = doubles_[i];
  }
  return out;
}

}  // namespace resonance
