#pragma once

#include "resonance/basis.hpp"
#include "resonance/grid.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace resonance {

using ConfigKeys = std::map<std::string, std::string>;

/// Flat `key = value` lines. `#` starts a comment, `include PATH` reads
/// another file (relative to the including one) in place. Later keys win.
ConfigKeys parse_config(std::istream& in, const std::string& base_dir = ".");
ConfigKeys read_config_file(const std::string& path);

enum class ExperimentKind { Halo, Lemmas, Zygmund, Resonance, Rearrange, MaxField };

ExperimentKind parse_experiment_kind(const std::string& name);
std::string experiment_name(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Halo;
  int n = 2;
  int k = 2;
  std::vector<double> rotations_deg;
  /// Cells per axis: the working grid, or the resolution cap for the
  /// staged constructions.
  std::int64_t grid = 1024;
  std::vector<double> hs;
  std::vector<double> ts;
  /// Ball radii in cells.
  std::vector<double> rs;
  std::vector<int> ns;
  std::vector<double> level_hs;
  int depth = 4;
  std::string out_dir = "out";
  ValueMode mode = ValueMode::Rational;
  std::uint64_t seed = 1;
  /// clip | faithful.
  std::string witness = "clip";
  /// maxfield: input grid file; a random instance when empty.
  std::string input;
  /// maxfield: truncation radius (physical).
  double r = kNoTruncation;
  double lambda = 1.0;
  std::uint64_t mc_samples = 10'000'000;
  /// Field files are written only up to this many cells.
  std::uint64_t field_limit = std::uint64_t{1} << 16;
  bool cache = true;

  int grid_bits() const;
};

/// Defaults for `kind` with `keys` applied on top. Throws InvalidArgument for
/// unknown keys, malformed values and violated invariants.
ExperimentConfig make_config(ExperimentKind kind, const ConfigKeys& keys);

/// Every field as sorted `key=value` lines.
std::string canonical_config(const ExperimentConfig& config);

/// Finest resolution (bits per axis) a staged run of `depth` stages needs.
int min_resolution_bits(int depth);

struct VerifiedItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunReport {
  nlohmann::json meta = nlohmann::json::object();
  nlohmann::json rows = nlohmann::json::array();
  std::vector<VerifiedItem> verified;
  /// Wall-clock seconds per phase; kept out of report.json.
  std::vector<std::pair<std::string, double>> timings;
  /// File name -> content, written next to report.json.
  std::map<std::string, std::string> artifacts;
  bool cache_hit = false;

  bool all_verified() const;
  /// {meta, rows[], verified[]}.
  nlohmann::json to_json() const;
};

RunReport run_halo(const ExperimentConfig& config);
RunReport run_lemma_checks(const ExperimentConfig& config);
RunReport run_zygmund(const ExperimentConfig& config);
RunReport run_resonance(const ExperimentConfig& config);
RunReport run_rearrangement_demo(const ExperimentConfig& config);
RunReport run_maxfield(const ExperimentConfig& config);

/// Dispatch on config.kind, consulting the cache under out_dir/.cache when
/// enabled.
RunReport run_experiment(const ExperimentConfig& config);

/// 16 hex digits over the canonical config and the code version.
std::string cache_key(const ExperimentConfig& config);
std::optional<RunReport> load_cached(const ExperimentConfig& config);
void store_cached(const ExperimentConfig& config, const RunReport& report);

/// report.json, timings.json and the artifacts, under `dir`.
void write_report(const RunReport& report, const std::string& dir);

}  // namespace resonance
