#pragma once

#include <cstddef>
#include <vector>

namespace resonance {

/// van Herk / Gil-Werman running maximum. Reads `len` elements of `in` at
/// stride `in_stride`, writes out[i] = max(in[i .. i+w-1]) for
/// i = 0 .. len-w at stride `out_stride`. `less(a, b)` must be a strict weak
/// order; ties keep the earlier element. `g` and `h` are scratch buffers.
template <typename T, typename Less>
void sliding_max_line(const T* in, std::size_t in_stride, std::size_t len, std::size_t w, T* out,
                      std::size_t out_stride, std::vector<T>& g, std::vector<T>& h, Less less) {
  if (w == 1) {
    for (std::size_t i = 0; i < len; ++i) out[i * out_stride] = in[i * in_stride];
    return;
  }
  g.resize(len);
  h.resize(len);
  auto pick = [&](const T& a, const T& b) -> const T& { return less(a, b) ? b : a; };
  for (std::size_t start = 0; start < len; start += w) {
    std::size_t end = std::min(start + w, len);
    g[start] = in[start * in_stride];
    for (std::size_t i = start + 1; i < end; ++i) g[i] = pick(g[i - 1], in[i * in_stride]);
    h[end - 1] = in[(end - 1) * in_stride];
    for (std::size_t i = end - 1; i > start; --i) h[i - 1] = pick(in[(i - 1) * in_stride], h[i]);
  }
  for (std::size_t i = 0; i + w <= len; ++i) out[i * out_stride] = pick(h[i], g[i + w - 1]);
}

/// Separable n-D running max over a box window. `data` has extents `ext`
/// (row-major, last axis fastest); axis j shrinks from ext[j] to
/// ext[j] - w[j] + 1. Returns the shrunk array and updates `ext`.
template <typename T, typename Less>
std::vector<T> sliding_max_nd(std::vector<T> data, std::vector<std::size_t>& ext,
                              const std::vector<std::size_t>& w, Less less) {
  const std::size_t n = ext.size();
  std::vector<T> g, h;
  for (std::size_t axis = 0; axis < n; ++axis) {
    if (w[axis] == 1) continue;
    std::vector<std::size_t> next = ext;
    next[axis] = ext[axis] - w[axis] + 1;
    std::size_t inner = 1;
    for (std::size_t j = axis + 1; j < n; ++j) inner *= ext[j];
    std::size_t outer = 1;
    for (std::size_t j = 0; j < axis; ++j) outer *= ext[j];
    std::vector<T> out(outer * next[axis] * inner);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < inner; ++i)
        sliding_max_line(data.data() + o * ext[axis] * inner + i, inner, ext[axis], w[axis],
                         out.data() + o * next[axis] * inner + i, inner, g, h, less);
    data = std::move(out);
    ext = std::move(next);
  }
  return data;
}

}  // namespace resonance
