#include "resonance/serialize.hpp"

#include "resonance/class_function.hpp"

#include "resonance/errors.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace resonance {

namespace {

void write_header(std::ostream& out, const DyadicGrid& g, const std::vector<std::string>& metadata) {
  if (!g.is_unit_cube()) throw InvalidArgument("text grid format only stores unit-cube grids");
  for (const auto& line : metadata) out << "# " << line << '\n';
  out << g.dim();
  for (int m : g.resolution()) out << ' ' << m;
  out << '\n';
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DyadicGrid read_header(std::istream& in) {
  read_metadata(in);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("missing grid header");
  std::istringstream hs(line);
  int n = 0;
  if (!(hs >> n) || n < 1) throw InvalidArgument("bad grid header '" + line + "'");
  std::vector<int> m(n);
  for (int j = 0; j < n; ++j)
    if (!(hs >> m[j])) throw InvalidArgument("bad grid header '" + line + "'");
  return DyadicGrid(m);
}

// Writes rows of the last axis on one line each.
template <typename Fn>
void write_rows(std::ostream& out, const DyadicGrid& g, Fn&& token) {
  const auto row = static_cast<std::size_t>(g.cells_along(g.dim() - 1));
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    out << token(i);
    out << ((i + 1) % row == 0 ? '\n' : ' ');
  }
}

}  // namespace

std::vector<std::string> read_metadata(std::istream& in) {
  std::vector<std::string> meta;
  while (in.peek() == '#') {
    std::string line;
    std::getline(in, line);
    auto start = line.find_first_not_of("# ");
    meta.push_back(start == std::string::npos ? "" : line.substr(start));
  }
  return meta;
}

void write_step_function(std::ostream& out, const StepFunction& f, const std::vector<std::string>& metadata) {
  write_header(out, f.grid(), metadata);
  if (f.mode() == ValueMode::Rational)
    write_rows(out, f.grid(), [&](std::size_t i) { return to_string(f.rationals()[i]); });
  else
    write_rows(out, f.grid(), [&](std::size_t i) { return format_double(f.value(i)); });
}

StepFunction read_step_function(std::istream& in, ValueMode mode) {
  DyadicGrid g = read_header(in);
  StepFunction f(g, mode);
  std::string tok;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (!(in >> tok)) throw InvalidArgument("grid file truncated");
    if (mode == ValueMode::Rational)
      f.set(i, parse_rational(tok));
    else
      f.set(i, tok.find('/') != std::string::npos ? to_double(parse_rational(tok)) : std::stod(tok));
  }
  return f;
}

void write_grid_set(std::ostream& out, const GridSet& s, const std::vector<std::string>& metadata) {
  write_header(out, s.grid(), metadata);
  write_rows(out, s.grid(), [&](std::size_t i) { return s.test(i) ? '1' : '0'; });
}

GridSet read_grid_set(std::istream& in) {
  DyadicGrid g = read_header(in);
  GridSet s(g);
  char c = 0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (!(in >> c)) throw InvalidArgument("grid file truncated");
    if (c != '0' && c != '1') throw InvalidArgument("set files hold only 0/1");
    if (c == '1') s.set(i);
  }
  return s;
}

void save_step_function(const std::string& path, const StepFunction& f, const std::vector<std::string>& metadata) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  write_step_function(out, f, metadata);
}

StepFunction load_step_function(const std::string& path, ValueMode mode) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  return read_step_function(in, mode);
}

void write_class_function(std::ostream& out, const ClassFunction& f, const std::vector<std::string>& metadata) {
  write_header(out, f.grid, metadata);
  std::vector<std::string> text;
  for (const auto& v : f.values) text.push_back(to_string(v));
  write_rows(out, f.grid, [&](std::size_t i) -> const std::string& { return text[f.cls[i]]; });
}

}  // namespace resonance
