#pragma once

#include "resonance/grid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace resonance {

// Plain-text grid format: optional `# ...` metadata lines, a header line
// `n m_1 ... m_n`, then one value per cell in row-major order. Rational
// values are written as `p/q`, sets as 0/1. The box is always the unit cube.

void write_step_function(std::ostream& out, const StepFunction& f,
                         const std::vector<std::string>& metadata = {});
StepFunction read_step_function(std::istream& in, ValueMode mode = ValueMode::Rational);

void write_grid_set(std::ostream& out, const GridSet& s,
                    const std::vector<std::string>& metadata = {});
GridSet read_grid_set(std::istream& in);

/// Metadata lines collected while reading (without the leading `# `).
std::vector<std::string> read_metadata(std::istream& in);

void save_step_function(const std::string& path, const StepFunction& f,
                        const std::vector<std::string>& metadata = {});
StepFunction load_step_function(const std::string& path, ValueMode mode = ValueMode::Rational);

}  // namespace resonance
