#pragma once

#include "resonance/grid.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace resonance {

/// n-dimensional summed-area table. Entry (i_1..i_n) holds the sum over all
/// cells with c_j < i_j, so every axis carries N_j + 1 entries. Rectangle
/// sums clip to the grid, which realises zero extension outside the box.
template <typename T>
class IntegralImage {
 public:
  IntegralImage() = default;

  IntegralImage(const DyadicGrid& grid, const std::vector<T>& values) : n_(grid.dim()) {
    extent_.resize(n_);
    stride_.resize(n_);
    for (int j = 0; j < n_; ++j) extent_[j] = grid.cells_along(j);
    std::size_t s = 1;
    for (int j = n_ - 1; j >= 0; --j) {
      stride_[j] = s;
      s *= static_cast<std::size_t>(extent_[j] + 1);
    }
    table_.assign(s, T{});

    // Scatter values to the shifted positions, then prefix-sum each axis.
    const auto& gs = grid.strides();
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::size_t rem = i, pos = 0;
      for (int j = 0; j < n_; ++j) {
        auto c = rem / gs[j];
        rem %= gs[j];
        pos += (c + 1) * stride_[j];
      }
      table_[pos] = values[i];
    }
    for (int axis = 0; axis < n_; ++axis) {
      const std::size_t st = stride_[axis];
      const std::size_t len = static_cast<std::size_t>(extent_[axis] + 1);
      for (std::size_t p = 0; p < table_.size(); ++p) {
        if ((p / st) % len == 0) continue;
        table_[p] += table_[p - st];
      }
    }
  }

  int dim() const { return n_; }

  /// Sum over the half-open cell box [lo, hi), clipped to the grid.
  T sum(const std::int64_t* lo, const std::int64_t* hi) const {
    std::int64_t clo[8], chi[8];
    std::vector<std::int64_t> big_lo, big_hi;
    std::int64_t* plo = clo;
    std::int64_t* phi = chi;
    if (n_ > 8) {
      big_lo.resize(n_);
      big_hi.resize(n_);
      plo = big_lo.data();
      phi = big_hi.data();
    }
    for (int j = 0; j < n_; ++j) {
      plo[j] = std::clamp<std::int64_t>(lo[j], 0, extent_[j]);
      phi[j] = std::clamp<std::int64_t>(hi[j], 0, extent_[j]);
      if (plo[j] >= phi[j]) return T{};
    }
    T total{};
    const unsigned corners = 1u << n_;
    for (unsigned mask = 0; mask < corners; ++mask) {
      std::size_t pos = 0;
      int parity = 0;
      for (int j = 0; j < n_; ++j) {
        if (mask & (1u << j)) {
          pos += static_cast<std::size_t>(plo[j]) * stride_[j];
          ++parity;
        } else {
          pos += static_cast<std::size_t>(phi[j]) * stride_[j];
        }
      }
      if (parity & 1)
        total -= table_[pos];
      else
        total += table_[pos];
    }
    return total;
  }

  T sum(const AxisRect& r) const { return sum(r.lo.data(), r.hi.data()); }

 private:
  int n_ = 0;
  std::vector<std::int64_t> extent_;
  std::vector<std::size_t> stride_;
  std::vector<T> table_;
};

/// Per-cell counts (0/1) of a set, ready for an integer integral image.
inline std::vector<std::int64_t> indicator_counts(const GridSet& s) {
  std::vector<std::int64_t> v(s.size(), 0);
  s.for_each([&](std::size_t i) { v[i] = 1; });
  return v;
}

/// Integral of a step function over rectangles, exact in rational mode.
class FunctionIntegral {
 public:
  explicit FunctionIntegral(const StepFunction& f);

  ValueMode mode() const { return mode_; }
  /// Integral of f over the rectangle (physical volume units).
  Rational integral(const AxisRect& r) const;
  double integral_double(const AxisRect& r) const;

 private:
  ValueMode mode_;
  Rational cell_volume_;
  double cell_volume_d_;
  IntegralImage<Rational> exact_;
  IntegralImage<double> approx_;
};

inline FunctionIntegral integral_image(const StepFunction& f) { return FunctionIntegral(f); }

/// Values of a rational-mode function written as integers over one common
/// denominator. Throws InfeasibleError if any rectangle sum could overflow
/// 62 bits.
struct CommonDenominator {
  std::vector<std::int64_t> numerators;
  BigInt denominator;
};
CommonDenominator common_denominator(const StepFunction& f);

}  // namespace resonance
