#pragma once

#include "resonance/pipeline.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace resonance {

/// Cell permutation of the plan grid: (f∘ω)(x) = f(perm[x]). Cells outside
/// the unit cube are not represented and stay fixed.
struct Rearrangement {
  DyadicGrid grid;
  std::vector<std::uint32_t> perm;

  std::vector<std::uint32_t> inverse() const;
};

/// ω maps E'_k = E_k minus the later E_j onto A'_k ⊆ A_k with
/// |A'_k| = |E'_k|, preferring cells already in E'_k, and is the identity on
/// cells outside every E'_k and A'_k. Throws InvalidArgument on a count
/// mismatch.
Rearrangement build_rearrangement(const ResonancePlan& plan);

struct RearrangementCheck {
  bool permutation = false;
  bool inverse = false;
  bool identity_outside = false;
  bool histogram = false;
  bool dominates = false;
  std::uint64_t moved = 0;
  bool ok() const { return permutation && inverse && identity_outside && histogram && dominates; }
};

/// Bijectivity, ω∘ω⁻¹ = id, exact value histogram of f∘ω versus f, and
/// (f∘ω)(x) >= g(x) on every cell.
RearrangementCheck verify_rearrangement(const Rearrangement& r, const ClassFunction& f, const ClassFunction& g);

/// f∘ω.
ClassFunction compose(const ClassFunction& f, const Rearrangement& r);

/// 64-bit FNV-1a of the text form of f.
std::uint64_t grid_checksum(const ClassFunction& f);

/// Header line with grid and checksum, then one target index per line.
void write_rearrangement(std::ostream& out, const Rearrangement& r, std::uint64_t source_checksum);

}  // namespace resonance
