#include "resonance/max_field.hpp"

#include "resonance/errors.hpp"
#include "resonance/integral_image.hpp"
#include "resonance/rotated.hpp"
#include "resonance/sliding_max.hpp"

#include <numeric>
#include <sstream>

namespace resonance {

namespace {

using i128 = __int128;

// Rectangle sums for both modes, with zero extension or periodic wrap.
class RectSums {
 public:
  RectSums(const StepFunction& f, bool wrap) : grid_(f.grid()), n_(f.grid().dim()), wrap_(wrap) {
    rational_ = f.mode() == ValueMode::Rational;
    std::vector<std::int64_t> nums;
    if (rational_) {
      auto cd = common_denominator(f);
      nums = std::move(cd.numerators);
      denominator_ = cd.denominator;
    }
    DyadicGrid sum_grid = grid_;
    if (wrap_) {
      std::vector<int> m = grid_.resolution();
      for (auto& e : m) ++e;
      sum_grid = DyadicGrid(m);
      std::vector<std::int64_t> tiled_n(rational_ ? sum_grid.cell_count() : 0);
      std::vector<double> tiled_d(rational_ ? 0 : sum_grid.cell_count());
      for (std::size_t i = 0; i < sum_grid.cell_count(); ++i) {
        Coord c = sum_grid.coord(i);
        for (int j = 0; j < n_; ++j) c[j] %= grid_.cells_along(j);
        auto src = grid_.index(c);
        if (rational_)
          tiled_n[i] = nums[src];
        else
          tiled_d[i] = f.value(src);
      }
      if (rational_)
        exact_ = IntegralImage<std::int64_t>(sum_grid, tiled_n);
      else
        approx_ = IntegralImage<double>(sum_grid, tiled_d);
    } else if (rational_) {
      exact_ = IntegralImage<std::int64_t>(grid_, nums);
    } else {
      approx_ = IntegralImage<double>(grid_, f.doubles());
    }
  }

  bool rational() const { return rational_; }
  const BigInt& denominator() const { return denominator_; }

  // lo may be negative; width w per axis.
  void window(const std::int64_t* lo, const std::int64_t* w, std::int64_t* a, std::int64_t* b) const {
    for (int j = 0; j < n_; ++j) {
      std::int64_t l = lo[j];
      if (wrap_) {
        const std::int64_t N = grid_.cells_along(j);
        l = ((l % N) + N) % N;
      }
      a[j] = l;
      b[j] = l + w[j];
    }
  }

  std::int64_t exact_sum(const std::int64_t* lo, const std::int64_t* w) const {
    std::int64_t a[8], b[8];
    window(lo, w, a, b);
    return exact_.sum(a, b);
  }
  double double_sum(const std::int64_t* lo, const std::int64_t* w) const {
    std::int64_t a[8], b[8];
    window(lo, w, a, b);
    return approx_.sum(a, b);
  }

 private:
  DyadicGrid grid_;
  int n_;
  bool wrap_;
  bool rational_ = false;
  BigInt denominator_ = 1;
  IntegralImage<std::int64_t> exact_;
  IntegralImage<double> approx_;
};

MaxField empty_field(const StepFunction& f, const BasisSpec& basis, double r, bool wrap) {
  MaxField out;
  out.grid = f.grid();
  out.basis = basis;
  out.r = r;
  out.mode = f.mode();
  out.wrap = wrap;
  const std::size_t total = f.grid().cell_count();
  out.values.assign(total, 0.0);
  if (f.mode() == ValueMode::Rational) {
    out.num.assign(total, 0);
    out.area.assign(total, 1);
  }
  return out;
}

void offer(MaxField& out, std::size_t cell, std::int64_t s, std::int64_t a) {
  if (static_cast<i128>(s) * out.area[cell] > static_cast<i128>(out.num[cell]) * a) {
    out.num[cell] = s;
    out.area[cell] = a;
  }
}

void finish(MaxField& out, const BigInt& den) {
  if (out.mode != ValueMode::Rational) return;
  out.denominator = den;
  const double dd = den.convert_to<double>();
  for (std::size_t i = 0; i < out.num.size(); ++i) {
    auto g = std::gcd(out.num[i], out.area[i]);
    if (g > 1) {
      out.num[i] /= g;
      out.area[i] /= g;
    }
    if (out.num[i] == 0) out.area[i] = 1;
    out.values[i] = static_cast<double>(out.num[i]) / (dd * static_cast<double>(out.area[i]));
  }
}

void check_dims(const StepFunction& f) {
  if (f.grid().dim() > 8) throw InvalidArgument("max field kernels support n <= 8");
}

// Quarter-turn rotated bases coincide with I_2^2; evaluate on the rotated
// function and map back, which exercises the covariance identity.
template <typename Eval>
MaxField via_quarter_turn(const StepFunction& f, const BasisSpec& basis, double r, int turns, Eval eval) {
  if (f.grid().resolution()[0] != f.grid().resolution()[1])
    throw InvalidArgument("quarter-turn rotation needs a square grid");
  StepFunction g = rotate_quarter(f, (4 - turns) % 4);
  MaxField axis = eval(g, BasisSpec::axis(2), r);
  MaxField out = axis;
  out.basis = basis;
  for (std::size_t i = 0; i < axis.values.size(); ++i) {
    std::size_t dst = rotate_cell(f.grid(), i, turns);
    out.values[dst] = axis.values[i];
    if (out.mode == ValueMode::Rational) {
      out.num[dst] = axis.num[i];
      out.area[dst] = axis.area[i];
    }
  }
  return out;
}

}  // namespace

Rational MaxField::exact(std::size_t i) const {
  if (mode == ValueMode::Rational) return Rational(BigInt(num[i]), denominator * area[i]);
  return rational_from_double(values[i]);
}

std::string MaxField::metadata() const {
  std::ostringstream os;
  os << basis.describe() << " r=" << (std::isinf(r) ? std::string("inf") : std::to_string(r))
     << " mode=" << (mode == ValueMode::Rational ? "rational" : "double");
  if (wrap) os << " wrap=1";
  if (lower_bound) os << " lower_bound=1";
  return os.str();
}

StepFunction MaxField::to_step_function() const {
  if (mode == ValueMode::Rational) {
    std::vector<Rational> v(values.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = exact(i);
    return StepFunction::from_rationals(grid, std::move(v));
  }
  return StepFunction::from_doubles(grid, values);
}

MaxField max_field_brute(const StepFunction& f, const BasisSpec& basis, double r, const MaxFieldOptions& opts) {
  check_dims(f);
  int turns = 0;
  if (basis.is_rotated()) {
    if (!basis.quarter_turn(&turns)) return rotated_max_field(f, basis.gamma, r);
    return via_quarter_turn(f, basis, r, turns, [&](const StepFunction& g, const BasisSpec& b, double rr) {
      return max_field_brute(g, b, rr, opts);
    });
  }
  const auto shapes = enumerate_shapes(basis, f.grid(), r);
  RectSums sums(f, opts.wrap);
  MaxField out = empty_field(f, basis, r, opts.wrap);
  const auto& grid = f.grid();
  const int n = grid.dim();
  Coord lo(n), d(n);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const Coord x = grid.coord(cell);
    for (const auto& w : shapes) {
      std::int64_t area = 1;
      for (int j = 0; j < n; ++j) area *= w[j];
      std::fill(d.begin(), d.end(), 0);
      std::int64_t best_n = -1;
      double best_d = -1.0;
      while (true) {
        for (int j = 0; j < n; ++j) lo[j] = x[j] - d[j];
        if (sums.rational())
          best_n = std::max(best_n, sums.exact_sum(lo.data(), w.data()));
        else
          best_d = std::max(best_d, sums.double_sum(lo.data(), w.data()));
        int j = n - 1;
        while (j >= 0 && ++d[j] == w[j]) {
          d[j] = 0;
          --j;
        }
        if (j < 0) break;
      }
      if (sums.rational())
        offer(out, cell, best_n, area);
      else
        out.values[cell] = std::max(out.values[cell], best_d / static_cast<double>(area));
    }
  }
  finish(out, sums.denominator());
  return out;
}

MaxField max_field_fast(const StepFunction& f, const BasisSpec& basis, double r, const MaxFieldOptions& opts) {
  check_dims(f);
  int turns = 0;
  if (basis.is_rotated()) {
    if (!basis.quarter_turn(&turns)) return rotated_max_field(f, basis.gamma, r);
    return via_quarter_turn(f, basis, r, turns, [&](const StepFunction& g, const BasisSpec& b, double rr) {
      return max_field_fast(g, b, rr, opts);
    });
  }
  const auto shapes = enumerate_shapes(basis, f.grid(), r);
  RectSums sums(f, opts.wrap);
  MaxField out = empty_field(f, basis, r, opts.wrap);
  const auto& grid = f.grid();
  const int n = grid.dim();

  for (const auto& w : shapes) {
    // Window sums indexed by shifted lower corner p' = p + (w - 1).
    std::vector<std::size_t> ext(n), win(n);
    std::size_t total = 1;
    std::int64_t area = 1;
    for (int j = 0; j < n; ++j) {
      ext[j] = static_cast<std::size_t>(grid.cells_along(j) + w[j] - 1);
      win[j] = static_cast<std::size_t>(w[j]);
      total *= ext[j];
      area *= w[j];
    }
    Coord p(n, 0), lo(n);
    auto advance = [&]() {
      int j = n - 1;
      while (j >= 0 && ++p[j] == static_cast<std::int64_t>(ext[j])) {
        p[j] = 0;
        --j;
      }
    };
    if (sums.rational()) {
      std::vector<std::int64_t> a(total);
      for (std::size_t i = 0; i < total; ++i, advance()) {
        for (int j = 0; j < n; ++j) lo[j] = p[j] - (w[j] - 1);
        a[i] = sums.exact_sum(lo.data(), w.data());
      }
      auto best = sliding_max_nd(std::move(a), ext, win, std::less<std::int64_t>());
      for (std::size_t cell = 0; cell < best.size(); ++cell) offer(out, cell, best[cell], area);
    } else {
      std::vector<double> a(total);
      for (std::size_t i = 0; i < total; ++i, advance()) {
        for (int j = 0; j < n; ++j) lo[j] = p[j] - (w[j] - 1);
        a[i] = sums.double_sum(lo.data(), w.data());
      }
      auto best = sliding_max_nd(std::move(a), ext, win, std::less<double>());
      const double inv = 1.0 / static_cast<double>(area);
      for (std::size_t cell = 0; cell < best.size(); ++cell)
        out.values[cell] = std::max(out.values[cell], best[cell] * inv);
    }
  }
  finish(out, sums.denominator());
  return out;
}

GridSet level_set(const MaxField& field, const Rational& lambda) {
  if (lambda < 0) throw InvalidArgument("level must be >= 0");
  GridSet s(field.grid);
  if (field.mode == ValueMode::Rational) {
    // num / (D area) > lambda  <=>  num * q > p * D * area  with lambda = p/q.
    const BigInt p = boost::multiprecision::numerator(lambda) * field.denominator;
    const BigInt q = boost::multiprecision::denominator(lambda);
    const BigInt limit = BigInt(1) << 62;
    if (p < limit && q < limit) {
      const auto pi = p.convert_to<std::int64_t>();
      const auto qi = q.convert_to<std::int64_t>();
      for (std::size_t i = 0; i < field.num.size(); ++i)
        if (static_cast<i128>(field.num[i]) * qi > static_cast<i128>(pi) * field.area[i]) s.set(i);
    } else {
      for (std::size_t i = 0; i < field.num.size(); ++i)
        if (BigInt(field.num[i]) * q > p * field.area[i]) s.set(i);
    }
    return s;
  }
  const double l = to_double(lambda);
  for (std::size_t i = 0; i < field.values.size(); ++i)
    if (field.values[i] > l) s.set(i);
  return s;
}

GridSet level_set(const MaxField& field, double lambda) { return level_set(field, rational_from_double(lambda)); }

bool fields_identical(const MaxField& a, const MaxField& b) {
  if (a.grid != b.grid || a.mode != b.mode) return false;
  if (a.mode == ValueMode::Rational) return a.denominator == b.denominator && a.num == b.num && a.area == b.area;
  return a.values == b.values;
}

std::size_t rotate_cell(const DyadicGrid& grid, std::size_t index, int turns) {
  const std::int64_t N = grid.cells_along(0);
  std::int64_t i = static_cast<std::int64_t>(index) / N;
  std::int64_t j = static_cast<std::int64_t>(index) % N;
  for (int t = 0; t < ((turns % 4) + 4) % 4; ++t) {
    std::int64_t ni = j, nj = N - 1 - i;
    i = ni;
    j = nj;
  }
  return static_cast<std::size_t>(i * N + j);
}

namespace {
void require_square(const DyadicGrid& g) {
  if (g.dim() != 2 || g.resolution()[0] != g.resolution()[1] || g.sides()[0] != g.sides()[1])
    throw InvalidArgument("quarter-turn maps need a square planar grid");
}
}  // namespace

GridSet rotate_quarter(const GridSet& s, int turns) {
  require_square(s.grid());
  GridSet out(s.grid());
  s.for_each([&](std::size_t i) { out.set(rotate_cell(s.grid(), i, turns)); });
  return out;
}

StepFunction rotate_quarter(const StepFunction& f, int turns) {
  require_square(f.grid());
  StepFunction out(f.grid(), f.mode());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto dst = rotate_cell(f.grid(), i, turns);
    if (f.mode() == ValueMode::Rational)
      out.set(dst, f.rationals()[i]);
    else
      out.set(dst, f.value(i));
  }
  return out;
}

}  // namespace resonance
