#include "resonance/basis.hpp"

#include "resonance/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace resonance {

bool BasisSpec::quarter_turn(int* turns) const {
  if (!is_rotated()) {
    if (turns) *turns = 0;
    return true;
  }
  double q = gamma / (std::numbers::pi / 2);
  double r = std::round(q);
  if (std::abs(q - r) > 1e-12) return false;
  if (turns) *turns = static_cast<int>(((static_cast<long long>(r) % 4) + 4) % 4);
  return true;
}

std::string BasisSpec::describe() const {
  std::ostringstream os;
  if (is_rotated())
    os << "basis=rotated k=2 gamma=" << gamma;
  else
    os << "basis=axis k=" << k << " gamma=0";
  return os.str();
}

bool edge_pattern_ok(const Coord& widths, const DyadicGrid& grid, int k) {
  std::vector<Rational> lengths;
  for (int j = 0; j < grid.dim(); ++j) {
    Rational len = grid.cell_length(j) * widths[j];
    if (std::find(lengths.begin(), lengths.end(), len) == lengths.end()) lengths.push_back(len);
  }
  return static_cast<int>(lengths.size()) <= k;
}

bool diameter_below(const Coord& widths, const DyadicGrid& grid, double r) {
  if (std::isinf(r) && r > 0) return true;
  if (!(r > 0)) return false;
  AxisRect rect{Coord(widths.size(), 0), widths};
  Rational rr = rational_from_double(r);
  return rect.diameter_squared(grid) < rr * rr;
}

std::vector<Coord> enumerate_shapes(const BasisSpec& basis, const DyadicGrid& grid, double r) {
  if (!(r > 0)) throw InvalidArgument("truncation radius must be > 0");
  const int n = grid.dim();
  if (basis.is_rotated() && n != 2) throw InvalidArgument("rotated bases are planar (n = 2)");
  const int k = basis.is_rotated() ? 2 : basis.k;
  if (k < 1) throw InvalidArgument("basis parameter k must be >= 1");

  std::vector<Coord> shapes;
  Coord w(n, 1);
  while (true) {
    if (edge_pattern_ok(w, grid, k) && diameter_below(w, grid, r)) shapes.push_back(w);
    int j = n - 1;
    while (j >= 0 && ++w[j] > grid.cells_along(j)) {
      w[j] = 1;
      --j;
    }
    if (j < 0) break;
  }
  if (shapes.empty())
    throw InvalidArgument("empty admissible family: truncation radius below one cell diagonal");
  return shapes;
}

}  // namespace resonance
