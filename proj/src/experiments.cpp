#include "resonance/experiments.hpp"

#include "resonance/errors.hpp"
#include "resonance/growth.hpp"
#include "resonance/halo.hpp"
#include "resonance/lemmas.hpp"
#include "resonance/max_field.hpp"
#include "resonance/pipeline.hpp"
#include "resonance/rearrangement.hpp"
#include "resonance/serialize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace resonance {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kCodeVersion = "resonance-0.4.0";

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void parse_into(std::istream& in, const fs::path& base, ConfigKeys& keys, std::set<std::string>& open) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("include", 0) == 0 && (line.size() == 7 || line[7] == ' ' || line[7] == '\t')) {
      std::string target = trim(line.substr(7));
      if (target.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": include needs a path");
      fs::path p = fs::path(target).is_absolute() ? fs::path(target) : base / target;
      std::string key = fs::weakly_canonical(p).string();
      if (open.count(key)) throw InvalidArgument("config include cycle at " + p.string());
      std::ifstream sub(p);
      if (!sub) throw InvalidArgument("cannot open included config " + p.string());
      open.insert(key);
      parse_into(sub, p.parent_path(), keys, open);
      open.erase(key);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
    keys[key] = trim(line.substr(eq + 1));
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  if (t == "e") return std::exp(1.0);
  if (t == "e2" || t == "e^2") return std::exp(2.0);
  if (t == "inf") return kNoTruncation;
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("bad number for " + key + ": " + text);
  }
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(trim(text), &used);
    if (used != trim(text).size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("bad integer for " + key + ": " + text);
  }
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(text)) out.push_back(parse_double(key, s));
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw InvalidArgument("bad boolean for " + key + ": " + text);
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

bool is_pow2(std::int64_t x) { return x > 0 && (x & (x - 1)) == 0; }

class Stopwatch {
 public:
  explicit Stopwatch(RunReport& report) : report_(report) {}
  void lap(const std::string& name) {
    auto now = std::chrono::steady_clock::now();
    report_.timings.emplace_back(name, std::chrono::duration<double>(now - start_).count());
    start_ = now;
  }

 private:
  RunReport& report_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

RunReport new_report(const ExperimentConfig& c) {
  RunReport r;
  r.meta["experiment"] = experiment_name(c.kind);
  r.meta["code_version"] = kCodeVersion;
  r.meta["config_hash"] = cache_key(c);
  r.meta["seed"] = c.seed;
  r.meta["mode"] = c.mode == ValueMode::Rational ? "rational" : "double";
  return r;
}

void verify(RunReport& r, const std::string& name, bool passed, std::string detail = {}) {
  r.verified.push_back({name, passed, std::move(detail)});
}

// Cells whose maximal value exceeds 1 for h chi_{ball} on a square window,
// truncation rho (cells).
std::uint64_t window_halo_count(double h, double r_cells, double rho, int k, std::int64_t* window) {
  std::int64_t need = 2 * static_cast<std::int64_t>(std::ceil(r_cells + rho)) + 4;
  std::int64_t w = 1;
  int bits = 0;
  while (w < need) {
    w *= 2;
    ++bits;
  }
  *window = w;
  DyadicGrid g = DyadicGrid::cube(2, bits);
  GridSet ball = discrete_ball(g, {w / 2, w / 2}, r_cells);
  auto f = StepFunction::indicator(ball, rational_from_double(h), ValueMode::Rational);
  auto field = max_field_fast(f, BasisSpec::axis(k), rho / static_cast<double>(w));
  return level_set(field, Rational(1)).count();
}

double dual_mode_gap(double h, double r_cells, double rho, int k) {
  const std::int64_t w = 128;
  DyadicGrid g = DyadicGrid::cube(2, 7);
  GridSet ball = discrete_ball(g, {w / 2, w / 2}, r_cells);
  auto exact = max_field_fast(StepFunction::indicator(ball, rational_from_double(h), ValueMode::Rational),
                              BasisSpec::axis(k), rho / w);
  auto approx = max_field_fast(StepFunction::indicator(ball, rational_from_double(h), ValueMode::Double),
                               BasisSpec::axis(k), rho / w);
  double gap = 0.0;
  for (std::size_t i = 0; i < g.cell_count(); ++i)
    gap = std::max(gap, std::abs(to_double(exact.exact(i)) - approx.values[i]));
  return gap;
}

double simplex_monte_carlo(int n, double h, std::uint64_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double L = std::log(h);
  std::uniform_real_distribution<double> u(0.0, L);
  std::uint64_t hit = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    double total = 0.0;
    for (int j = 0; j < n; ++j) total += u(rng);
    if (total < L) ++hit;
  }
  return std::pow(L, n) * static_cast<double>(hit) / static_cast<double>(samples);
}

WitnessSource witness_source(const ExperimentConfig& c, const GrowthFunction& phi) {
  BallTemplate tpl;
  tpl.mode = c.witness == "faithful" ? WitnessMode::Faithful : WitnessMode::ClipToQ;
  return ball_witness_source(tpl, phi);
}

std::vector<BasisSpec> zygmund_bases(const ExperimentConfig& c) {
  std::vector<BasisSpec> bases;
  for (double d : c.rotations_deg) bases.push_back(BasisSpec::rotated(d * M_PI / 180.0));
  return bases;
}

struct StagedRun {
  ResonancePlan plan;
  PlanReport report;
};

StagedRun staged_run(const ExperimentConfig& c, const std::vector<BasisSpec>& bases, const GrowthFunction& phi,
                     RunReport& out) {
  Stopwatch sw(out);
  PipelineOptions opt;
  opt.max_bits = c.grid_bits();
  auto f = synthetic_resonance_function(c.seed);
  StagedRun run{build_resonance_function(f, bases, phi, c.depth, witness_source(c, phi), opt), {}};
  sw.lap("build");
  run.report = verify_plan(run.plan);
  sw.lap("verify");

  const auto& rep = run.report;
  verify(out, "chained_resolutions", rep.chained);
  verify(out, "measure_bounds", rep.measure_bounds);
  verify(out, "witnesses", rep.witnesses, "certificates rechecked and contained in the exact level set");
  verify(out, "replication", rep.replication, "certificates translated into every tile and rechecked");
  verify(out, "uniform_distribution", rep.uniform);
  verify(out, "independence", rep.independent(), "product rule for every subset of size <= 3");
  verify(out, "integral_chain", rep.integral_chain);
  bool formula = std::all_of(rep.curves.begin(), rep.curves.end(), [](const auto& cv) { return cv.matches(); });
  verify(out, "divergence_formula", formula, "union mass equals 1 - prod(1 - |P_k|)");

  out.meta["grid"] = run.plan.grid.describe();
  out.meta["depth"] = c.depth;
  out.meta["phi"] = phi.name();
  out.meta["witness"] = c.witness;
  json plan = json::parse(plan_json(run.plan, rep));
  out.meta["integrals"] = {{"integral_g", plan["integral_g"]},
                           {"integral_f", plan["integral_f"]},
                           {"sum_h_E", plan["sum_h_E"]},
                           {"sum_h_A", plan["sum_h_A"]}};
  for (const auto& st : plan["stages"]) {
    json row = st;
    row["type"] = "stage";
    out.rows.push_back(row);
  }
  double min_final = 1.0;
  std::ostringstream csv, dat;
  csv << "basis,K,union,formula,union_double\n";
  for (const auto& cv : rep.curves) {
    dat << "# " << cv.basis.describe() << "\n";
    for (std::size_t k = 0; k < cv.union_mass.size(); ++k) {
      double u = to_double(cv.union_mass[k]);
      out.rows.push_back({{"type", "divergence"},
                          {"basis", cv.basis.describe()},
                          {"K", k + 1},
                          {"union", to_string(cv.union_mass[k])},
                          {"formula", to_string(cv.formula[k])},
                          {"union_double", u}});
      csv << cv.basis.describe() << ',' << k + 1 << ',' << to_string(cv.union_mass[k]) << ','
          << to_string(cv.formula[k]) << ',' << num(u) << '\n';
      dat << k + 1 << ' ' << num(u) << '\n';
    }
    dat << "\n\n";
    if (!cv.union_mass.empty()) min_final = std::min(min_final, to_double(cv.union_mass.back()));
  }
  out.meta["min_final_union_mass"] = min_final;
  bool nondecreasing = true;
  for (const auto& cv : rep.curves)
    for (std::size_t k = 1; k < cv.union_mass.size(); ++k) nondecreasing &= cv.union_mass[k - 1] <= cv.union_mass[k];
  verify(out, "union_nondecreasing", nondecreasing);
  out.artifacts["divergence.csv"] = csv.str();
  out.artifacts["divergence.dat"] = dat.str();
  out.artifacts["stages.json"] = plan.dump(2) + "\n";
  sw.lap("report");
  return run;
}

void validate(const ExperimentConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
  };
  need(c.n >= 1 && c.n <= 4, "n must be in 1..4");
  need(c.k >= 1 && c.k <= c.n, "k must be in 1..n");
  need(is_pow2(c.grid) && c.grid >= 2 && c.grid <= (std::int64_t{1} << 14), "grid must be a power of two in 2..16384");
  need(c.mode == ValueMode::Rational || c.mode == ValueMode::Double, "bad mode");
  need(c.witness == "clip" || c.witness == "faithful", "witness must be clip or faithful");
  switch (c.kind) {
    case ExperimentKind::Halo:
      need(c.n == 2, "halo sweeps are planar (n = 2)");
      need(!c.hs.empty() && !c.ts.empty() && !c.rs.empty(), "hs, ts and rs must be nonempty");
      for (double h : c.hs) need(h > 1, "every h must exceed 1");
      for (double t : c.ts) need(t > 1, "every t must exceed 1");
      for (double r : c.rs) need(r >= 1 && 2 * r <= static_cast<double>(c.grid), "every ball must fit the grid");
      break;
    case ExperimentKind::Lemmas:
      need(!c.hs.empty() && !c.ns.empty() && !c.level_hs.empty(), "hs, ns and level_hs must be nonempty");
      for (double h : c.hs) need(h > 1, "every h must exceed 1");
      for (int n : c.ns) need(n >= 1 && n <= 6, "log integral dimensions must be in 1..6");
      for (double h : c.level_hs) need(h > std::ldexp(1.0, c.n), "interval level sets need h > 2^n");
      need(c.mc_samples > 0, "mc_samples must be positive");
      break;
    case ExperimentKind::Zygmund:
      need(c.n == 2, "rotated bases are planar (n = 2)");
      need(!c.rotations_deg.empty(), "rotations must be nonempty");
      [[fallthrough]];
    case ExperimentKind::Resonance:
    case ExperimentKind::Rearrange:
      need(c.n == 2, "the shipped synthetic instance is planar (n = 2)");
      need(c.depth >= 1, "depth must be >= 1");
      need(c.grid_bits() >= min_resolution_bits(c.depth),
           "grid " + std::to_string(c.grid) + " is below the minimum 2^" + std::to_string(min_resolution_bits(c.depth)) +
               " for depth " + std::to_string(c.depth));
      break;
    case ExperimentKind::MaxField:
      need(c.r > 0, "truncation must be positive");
      need(c.rotations_deg.size() <= 1, "maxfield takes at most one rotation");
      need(c.rotations_deg.empty() || c.n == 2, "rotated bases are planar (n = 2)");
      break;
  }
}

}  // namespace

ConfigKeys parse_config(std::istream& in, const std::string& base_dir) {
  ConfigKeys keys;
  std::set<std::string> open;
  parse_into(in, fs::path(base_dir), keys, open);
  return keys;
}

ConfigKeys read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path);
  ConfigKeys keys;
  std::set<std::string> open{fs::weakly_canonical(path).string()};
  parse_into(in, fs::path(path).parent_path(), keys, open);
  return keys;
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "halo") return ExperimentKind::Halo;
  if (name == "lemmas") return ExperimentKind::Lemmas;
  if (name == "zygmund") return ExperimentKind::Zygmund;
  if (name == "resonance") return ExperimentKind::Resonance;
  if (name == "rearrange") return ExperimentKind::Rearrange;
  if (name == "maxfield") return ExperimentKind::MaxField;
  throw InvalidArgument("unknown experiment " + name);
}

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Halo: return "halo";
    case ExperimentKind::Lemmas: return "lemmas";
    case ExperimentKind::Zygmund: return "zygmund";
    case ExperimentKind::Resonance: return "resonance";
    case ExperimentKind::Rearrange: return "rearrange";
    case ExperimentKind::MaxField: return "maxfield";
  }
  return "?";
}

int ExperimentConfig::grid_bits() const {
  int b = 0;
  while ((std::int64_t{1} << b) < grid) ++b;
  return b;
}

int min_resolution_bits(int depth) { return BallTemplate{}.bits * depth; }

ExperimentConfig make_config(ExperimentKind kind, const ConfigKeys& keys) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::Halo:
      c.grid = 1024;
      c.hs = {4, 8, 16, 32, 64, 128, 256};
      c.ts = {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048};
      c.rs = {8, 16, 32};
      break;
    case ExperimentKind::Lemmas:
      c.grid = 64;
      c.hs = {std::exp(1.0), std::exp(2.0), 10.0};
      c.ns = {1, 2, 3};
      c.level_hs = {8, 16, 32, 64, 128, 256};
      break;
    case ExperimentKind::Zygmund:
      c.grid = 4096;
      c.rotations_deg = {0, 22.5, 45, 67.5};
      break;
    case ExperimentKind::Resonance:
      c.grid = 4096;
      break;
    case ExperimentKind::Rearrange:
      c.grid = 4096;
      c.depth = 2;
      break;
    case ExperimentKind::MaxField:
      c.grid = 16;
      break;
  }
  for (const auto& [key, value] : keys) {
    if (key == "n") c.n = static_cast<int>(parse_int(key, value));
    else if (key == "k") c.k = static_cast<int>(parse_int(key, value));
    else if (key == "rotations") c.rotations_deg = parse_doubles(key, value);
    else if (key == "grid") c.grid = parse_int(key, value);
    else if (key == "hs") c.hs = parse_doubles(key, value);
    else if (key == "ts") c.ts = parse_doubles(key, value);
    else if (key == "rs") c.rs = parse_doubles(key, value);
    else if (key == "level_hs") c.level_hs = parse_doubles(key, value);
    else if (key == "ns") {
      c.ns.clear();
      for (const auto& s : split_list(value)) c.ns.push_back(static_cast<int>(parse_int(key, s)));
    } else if (key == "depth") c.depth = static_cast<int>(parse_int(key, value));
    else if (key == "out") c.out_dir = value;
    else if (key == "mode") {
      if (value == "rational") c.mode = ValueMode::Rational;
      else if (value == "double") c.mode = ValueMode::Double;
      else throw InvalidArgument("mode must be rational or double");
    } else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "witness") c.witness = value;
    else if (key == "input") c.input = value;
    else if (key == "r") c.r = parse_double(key, value);
    else if (key == "lambda") c.lambda = parse_double(key, value);
    else if (key == "mc_samples") c.mc_samples = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "field_limit") c.field_limit = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "cache") c.cache = parse_bool(key, value);
    else throw InvalidArgument("unknown config key " + key);
  }
  validate(c);
  return c;
}

std::string canonical_config(const ExperimentConfig& c) {
  std::map<std::string, std::string> kv;
  kv["experiment"] = experiment_name(c.kind);
  kv["n"] = std::to_string(c.n);
  kv["k"] = std::to_string(c.k);
  kv["rotations"] = join(c.rotations_deg);
  kv["grid"] = std::to_string(c.grid);
  kv["hs"] = join(c.hs);
  kv["ts"] = join(c.ts);
  kv["rs"] = join(c.rs);
  std::vector<double> ns(c.ns.begin(), c.ns.end());
  kv["ns"] = join(ns);
  kv["level_hs"] = join(c.level_hs);
  kv["depth"] = std::to_string(c.depth);
  kv["mode"] = c.mode == ValueMode::Rational ? "rational" : "double";
  kv["seed"] = std::to_string(c.seed);
  kv["witness"] = c.witness;
  kv["input"] = c.input;
  kv["r"] = num(c.r);
  kv["lambda"] = num(c.lambda);
  kv["mc_samples"] = std::to_string(c.mc_samples);
  kv["field_limit"] = std::to_string(c.field_limit);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

bool RunReport::all_verified() const {
  return std::all_of(verified.begin(), verified.end(), [](const auto& v) { return v.passed; });
}

json RunReport::to_json() const {
  json v = json::array();
  for (const auto& item : verified) v.push_back({{"name", item.name}, {"passed", item.passed}, {"detail", item.detail}});
  return {{"meta", meta}, {"rows", rows}, {"verified", v}};
}

RunReport run_halo(const ExperimentConfig& c) {
  RunReport out = new_report(c);
  Stopwatch sw(out);
  HaloProbe probe;
  probe.basis = BasisSpec::axis(c.k);
  probe.grid_bits = c.grid_bits();
  std::vector<HaloEstimate> ests;
  std::vector<double> phi;
  bool sample_max = true;
  for (double h : c.hs) {
    probe.h = h;
    auto est = halo_estimate(probe, c.ts, c.rs);
    double best = 0.0;
    const HaloSample* arg = nullptr;
    for (const auto& s : est.samples)
      if (s.ratio > best || !arg) {
        best = s.ratio;
        arg = &s;
      }
    sample_max &= best == est.phi_hat;
    out.rows.push_back({{"h", h},
                        {"phi_hat", est.phi_hat},
                        {"phi_over_h", est.phi_hat / h},
                        {"ratio_model", est.phi_hat / (h * std::pow(1 + std::log(h), c.k - 1))},
                        {"best_t", arg->t},
                        {"best_r_cells", arg->r_cells},
                        {"level_cells", arg->level_cells},
                        {"ball_cells", arg->ball_cells}});
    phi.push_back(est.phi_hat);
    ests.push_back(std::move(est));
  }
  sw.lap("sweep");
  verify(out, "phi_hat_is_sample_max", sample_max);

  bool monotone = true;
  for (std::size_t i = 1; i < phi.size(); ++i) monotone &= phi[i] / c.hs[i] > phi[i - 1] / c.hs[i - 1];
  out.meta["basis"] = probe.basis.describe();
  out.meta["grid"] = c.grid;
  out.meta["phi_over_h_increasing"] = monotone;
  if (c.hs.size() >= 3) {
    auto [lo, hi] = halo_fit(c.hs, phi, c.k - 1);
    out.meta["fit"] = {{"exponent", c.k - 1},
                       {"c_low", lo},
                       {"c_high", hi},
                       {"band", hi / lo},
                       {"loglog_slope", loglog_slope(c.hs, phi)}};
  }

  const double h0 = c.hs.front(), r0 = *std::min_element(c.rs.begin(), c.rs.end());
  const double t0 = *std::min_element(c.ts.begin(), c.ts.end());
  const auto& first = ests.front().samples;
  auto it = std::find_if(first.begin(), first.end(), [&](const auto& s) { return s.r_cells == r0 && s.t == t0; });
  std::int64_t window = 0;
  auto count = window_halo_count(h0, r0, t0 * r0, c.k, &window);
  verify(out, "lattice_count_matches_window", it != first.end() && it->level_cells == count,
         "h=" + num(h0) + " r=" + num(r0) + " t=" + num(t0) + " window=" + std::to_string(window));
  sw.lap("window_check");
  double gap = dual_mode_gap(h0, r0, std::min(t0 * r0, 32.0), c.k);
  verify(out, "rational_double_agree", gap <= 1e-9, "128x128 field, max gap " + num(gap));
  sw.lap("dual_mode");

  std::ostringstream csv, dat;
  write_halo_csv(csv, probe, ests);
  write_halo_gnuplot(dat, ests);
  out.artifacts["halo.csv"] = csv.str();
  out.artifacts["halo.dat"] = dat.str();
  return out;
}

RunReport run_lemma_checks(const ExperimentConfig& c) {
  RunReport out = new_report(c);
  Stopwatch sw(out);
  bool closed = true, mc_ok = true, invariant = true;
  double worst = 0.0, worst_mc = 0.0;
  for (int n : c.ns)
    for (double h : c.hs) {
      double v = lemma9_integral(n, std::vector<double>(n, 1.0), h);
      std::vector<double> delta;
      for (int j = 0; j < n; ++j) delta.push_back(0.25 * (j + 1) + 0.1);
      double shifted = lemma9_integral(n, delta, h);
      double cf = lemma9_closed_form(n, h);
      double mc = simplex_monte_carlo(n, h, c.mc_samples, c.seed + static_cast<std::uint64_t>(n));
      double rel = std::abs(v - cf) / cf, rel_mc = std::abs(mc - cf) / cf;
      closed &= rel <= 1e-6;
      mc_ok &= rel_mc <= 1e-2;
      invariant &= std::abs(v - shifted) <= 1e-9 * std::max(1.0, v);
      worst = std::max(worst, rel);
      worst_mc = std::max(worst_mc, rel_mc);
      out.rows.push_back({{"op", "lemma9_integral"},
                          {"n", n},
                          {"h", h},
                          {"integral", v},
                          {"closed_form", cf},
                          {"monte_carlo", mc},
                          {"relative_error", rel},
                          {"monte_carlo_relative_error", rel_mc},
                          {"delta_shift_gap", std::abs(v - shifted)}});
    }
  sw.lap("log_integral");
  verify(out, "log_integral_monte_carlo_oracle", mc_ok,
         std::to_string(c.mc_samples) + " samples, worst relative gap " + num(worst_mc));
  verify(out, "log_integral_closed_form", closed, "worst relative error " + num(worst));
  verify(out, "log_integral_delta_invariance", invariant);

  DyadicGrid g = DyadicGrid::cube(c.n, c.grid_bits());
  const std::int64_t mid = c.grid / 2;
  AxisRect I{Coord(c.n, mid - 1), Coord(c.n, mid + 1)};
  std::vector<double> model;
  for (double h : c.level_hs) {
    auto res = lemma10_levelset_measure(I, h, c.k, g);
    model.push_back(res.ratio_model);
    out.rows.push_back({{"op", "lemma10_levelset_measure"},
                        {"n", c.n},
                        {"k", c.k},
                        {"h", h},
                        {"measure", to_string(res.measure)},
                        {"measure_double", to_double(res.measure)},
                        {"ratio_k", res.ratio_k},
                        {"ratio_k_minus_1", res.ratio_k_minus_1},
                        {"ratio_model", res.ratio_model},
                        {"region_measure", res.region_measure},
                        {"lattice", res.lattice}});
  }
  if (c.level_hs.size() >= 2) {
    auto fit = lemma10_fit(I, c.level_hs, c.k, g);
    out.meta["interval_level_set_fit"] = {{"slope", fit.slope}, {"exponent", fit.exponent}};
  }
  out.meta["interval"] = {{"lo", I.lo}, {"hi", I.hi}, {"grid", g.describe()}};
  sw.lap("interval_level_set");

  if (c.n == 2) {
    const double h0 = *std::min_element(c.level_hs.begin(), c.level_hs.end());
    std::int64_t need = 2 * static_cast<std::int64_t>(std::ceil(h0 * 2)) + 6;
    int bits = 1;
    while ((std::int64_t{1} << bits) < need) ++bits;
    const std::int64_t w = std::int64_t{1} << bits;
    if (bits <= 8) {
      DyadicGrid wg = DyadicGrid::cube(2, bits);
      AxisRect J{{w / 2 - 1, w / 2 - 1}, {w / 2 + 1, w / 2 + 1}};
      auto f = StepFunction::indicator(GridSet::from_rect(wg, J), rational_from_double(h0), ValueMode::Rational);
      auto win = level_set(max_field_fast(f, BasisSpec::axis(c.k), kNoTruncation), Rational(1));
      auto res = lemma10_levelset_measure(J, h0, c.k, wg);
      verify(out, "interval_level_set_window_recount", res.measure == win.measure(),
             "h=" + num(h0) + " window=" + std::to_string(w));
    }
    DyadicGrid tg = DyadicGrid::cube(2, 4);
    GridSet s = GridSet::from_rect(tg, AxisRect{{6, 6}, {8, 8}});
    auto f = StepFunction::indicator(s, Rational(1) + Rational(1, 1000000), ValueMode::Rational);
    auto e = level_set(max_field_fast(f, BasisSpec::axis(c.k), kNoTruncation), Rational(1));
    verify(out, "interval_in_own_level_set", s.subset_of(e), "h = 1 + 1e-6");
    sw.lap("interval_level_set_checks");
  }

  std::ostringstream dat;
  dat << "# n h integral closed_form\n";
  for (const auto& row : out.rows)
    if (row["op"] == "lemma9_integral")
      dat << row["n"].get<int>() << ' ' << num(row["h"]) << ' ' << num(row["integral"]) << ' '
          << num(row["closed_form"]) << '\n';
  dat << "\n\n# h measure ratio_model\n";
  for (const auto& row : out.rows)
    if (row["op"] == "lemma10_levelset_measure")
      dat << num(row["h"]) << ' ' << num(row["measure_double"]) << ' ' << num(row["ratio_model"]) << '\n';
  out.artifacts["lemmas.dat"] = dat.str();
  return out;
}

RunReport run_resonance(const ExperimentConfig& c) {
  RunReport out = new_report(c);
  staged_run(c, {BasisSpec::axis(c.k)}, GrowthFunction::llogl(c.k), out);
  return out;
}

RunReport run_zygmund(const ExperimentConfig& c) {
  RunReport out = new_report(c);
  auto bases = zygmund_bases(c);
  out.meta["rotations_deg"] = c.rotations_deg;
  auto run = staged_run(c, bases, GrowthFunction::llogl(2), out);
  Stopwatch sw(out);
  for (std::size_t a = 0; a < bases.size(); ++a)
    for (std::size_t b = 0; b < bases.size(); ++b) {
      double diff = std::fmod(c.rotations_deg[b] - c.rotations_deg[a] + 360.0, 360.0);
      if (std::abs(diff - 90.0) > 1e-9) continue;
      bool same = run.report.curves[a].union_mass == run.report.curves[b].union_mass;
      for (const auto& st : run.plan.stages) same &= rotate_quarter(st.p[a], 1) == st.p[b];
      verify(out, "quarter_turn_symmetry", same,
             num(c.rotations_deg[a]) + " vs " + num(c.rotations_deg[b]) + " deg: mapped level sets and masses");
    }
  sw.lap("symmetry");
  return out;
}

RunReport run_rearrangement_demo(const ExperimentConfig& c) {
  RunReport out = new_report(c);
  auto run = staged_run(c, {BasisSpec::axis(c.k)}, GrowthFunction::llogl(c.k), out);
  Stopwatch sw(out);
  auto omega = build_rearrangement(run.plan);
  sw.lap("rearrange");
  auto check = verify_rearrangement(omega, run.plan.f, run.plan.g);
  auto fw = compose(run.plan.f, omega);
  std::vector<Rational> before, after;
  for (std::size_t i = 0; i < fw.cls.size(); ++i) {
    before.push_back(run.plan.f.value(i));
    after.push_back(fw.value(i));
  }
  std::sort(before.begin(), before.end());
  std::sort(after.begin(), after.end());
  sw.lap("verify_rearrangement");
  verify(out, "permutation", check.permutation);
  verify(out, "inverse", check.inverse, "omega after omega^-1 is the identity");
  verify(out, "identity_outside_unit_cube", check.identity_outside);
  verify(out, "histogram", check.histogram, "exact value histogram of f∘ω equals that of f");
  verify(out, "histogram_sort_compare", before == after);
  verify(out, "dominates_g", check.dominates, "(f∘ω)(x) >= g(x) on every cell");
  out.meta["moved_cells"] = check.moved;
  out.meta["checksum_f"] = grid_checksum(run.plan.f);
  out.meta["checksum_f_omega"] = grid_checksum(fw);
  auto hf = run.plan.f.value_histogram();
  auto hw = fw.value_histogram();
  for (std::size_t i = 0; i < std::max(hf.size(), hw.size()); ++i)
    out.rows.push_back({{"type", "histogram"},
                        {"value", i < hf.size() ? to_string(hf[i].first) : ""},
                        {"cells_f", i < hf.size() ? hf[i].second : 0},
                        {"value_f_omega", i < hw.size() ? to_string(hw[i].first) : ""},
                        {"cells_f_omega", i < hw.size() ? hw[i].second : 0}});
  if (run.plan.grid.cell_count() <= c.field_limit) {
    std::ostringstream f, fo, g, w;
    write_class_function(f, run.plan.f, {"f"});
    write_class_function(fo, fw, {"f composed with omega"});
    write_class_function(g, run.plan.g, {"g"});
    write_rearrangement(w, omega, grid_checksum(run.plan.f));
    out.artifacts["f.txt"] = f.str();
    out.artifacts["f_omega.txt"] = fo.str();
    out.artifacts["g.txt"] = g.str();
    out.artifacts["omega.txt"] = w.str();
  } else {
    out.meta["fields_omitted"] = "grid exceeds field_limit";
  }
  sw.lap("write");
  return out;
}

RunReport run_maxfield(const ExperimentConfig& c) {
  RunReport out = new_report(c);
  Stopwatch sw(out);
  StepFunction f;
  if (!c.input.empty()) {
    f = load_step_function(c.input, c.mode);
  } else {
    DyadicGrid g(std::vector<int>(c.n, c.grid_bits()));
    std::mt19937_64 rng(c.seed);
    std::uniform_int_distribution<int> v(0, 3);
    std::vector<Rational> vals(g.cell_count());
    for (auto& x : vals) x = Rational(v(rng));
    f = StepFunction::from_rationals(g, vals).with_mode(c.mode);
  }
  BasisSpec basis = c.rotations_deg.empty() ? BasisSpec::axis(c.k) : BasisSpec::rotated(c.rotations_deg[0] * M_PI / 180);
  auto field = max_field_fast(f, basis, c.r);
  sw.lap("fast");
  auto ls = level_set(field, c.lambda);
  if (f.grid().cell_count() <= 4096 && !basis.is_rotated()) {
    auto brute = max_field_brute(f, basis, c.r);
    sw.lap("brute");
    verify(out, "fast_equals_brute", fields_identical(field, brute));
  }
  double peak = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    peak = std::max(peak, field.mode == ValueMode::Rational ? to_double(field.exact(i)) : field.values[i]);
  out.meta["grid"] = f.grid().describe();
  out.meta["basis"] = basis.describe();
  out.meta["lower_bound"] = field.lower_bound;
  out.rows.push_back({{"cells", f.size()},
                      {"lambda", c.lambda},
                      {"level_cells", ls.count()},
                      {"level_measure", to_string(ls.normalized_measure())},
                      {"max_value", peak}});
  if (f.size() <= c.field_limit) {
    std::ostringstream mf, lv;
    write_step_function(mf, field.to_step_function(), {field.metadata()});
    write_grid_set(lv, ls, {"level set > " + num(c.lambda)});
    out.artifacts["maxfield.txt"] = mf.str();
    out.artifacts["levelset.txt"] = lv.str();
  }
  sw.lap("write");
  return out;
}

std::string cache_key(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  mix(canonical_config(c));
  mix(kCodeVersion);
  if (!c.input.empty()) {
    std::ifstream in(c.input, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    mix(ss.str());
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<RunReport> load_cached(const ExperimentConfig& c) {
  fs::path p = fs::path(c.out_dir) / ".cache" / (cache_key(c) + ".json");
  std::ifstream in(p);
  if (!in) return std::nullopt;
  try {
    json j = json::parse(in);
    if (j.at("key") != cache_key(c)) return std::nullopt;
    RunReport r;
    r.meta = j.at("report").at("meta");
    r.rows = j.at("report").at("rows");
    for (const auto& v : j.at("report").at("verified"))
      r.verified.push_back({v.at("name"), v.at("passed"), v.at("detail")});
    for (const auto& [name, content] : j.at("artifacts").items()) r.artifacts[name] = content.get<std::string>();
    r.cache_hit = true;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void store_cached(const ExperimentConfig& c, const RunReport& r) {
  fs::path dir = fs::path(c.out_dir) / ".cache";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return;
  json j = {{"key", cache_key(c)}, {"report", r.to_json()}, {"artifacts", r.artifacts}};
  std::ofstream out(dir / (cache_key(c) + ".json"));
  out << j.dump() << '\n';
}

RunReport run_experiment(const ExperimentConfig& c) {
  if (c.cache)
    if (auto hit = load_cached(c)) {
      hit->timings.emplace_back("cache_load", 0.0);
      return *hit;
    }
  RunReport r;
  switch (c.kind) {
    case ExperimentKind::Halo: r = run_halo(c); break;
    case ExperimentKind::Lemmas: r = run_lemma_checks(c); break;
    case ExperimentKind::Zygmund: r = run_zygmund(c); break;
    case ExperimentKind::Resonance: r = run_resonance(c); break;
    case ExperimentKind::Rearrange: r = run_rearrangement_demo(c); break;
    case ExperimentKind::MaxField: r = run_maxfield(c); break;
  }
  if (c.cache && r.all_verified()) store_cached(c, r);
  return r;
}

void write_report(const RunReport& r, const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "report.json");
    out << r.to_json().dump(2) << '\n';
  }
  {
    json t = json::object();
    for (const auto& [name, sec] : r.timings) t[name] = sec;
    std::ofstream out(fs::path(dir) / "timings.json");
    out << json{{"cache_hit", r.cache_hit}, {"seconds", t}}.dump(2) << '\n';
  }
  for (const auto& [name, content] : r.artifacts) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    out << content;
  }
}

}  // namespace resonance
