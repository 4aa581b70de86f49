#pragma once

#include "resonance/class_function.hpp"
#include "resonance/replicate.hpp"
#include "resonance/selection.hpp"
#include "resonance/witness.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace resonance {

struct WitnessRequest {
  /// h_k / q_k.
  Rational h;
  double eps = 0.0;
  int stage = 0;
  Rational delta;
  /// Coarse resolution m_k of the stage.
  int m = 0;
  std::vector<BasisSpec> bases;
};

struct WitnessSource {
  std::string name;
  /// c(h) of the witnesses this source produces, used as the size cap.
  std::function<Rational(double)> density;
  std::function<MPhiWitness(const WitnessRequest&)> build;
};

/// Ball witnesses on a fixed template; the physical side is chosen so that
/// the replicated cell side matches.
WitnessSource ball_witness_source(const BallTemplate& tpl, const GrowthFunction& phi,
                                  const RotatedSampling& sampling = {});

struct PipelineOptions {
  int max_bits = 12;
  /// Stage i asks the level-set selection for mass τ i.
  double target_scale = 0.125;
  /// Truncation ε_k = eps_scale / k.
  double eps_scale = 2.0;
};

struct PlanStage {
  int k = 0;
  int m = 0;
  int i = 0;
  int j = 0;
  Rational h;
  int q = 0;
  /// |A_k|, the replication target.
  Rational delta;
  double eps = 0.0;
  double truncation = 0.0;
  /// Sets on the final grid.
  GridSet e;
  std::vector<GridSet> p;
  /// Witness constants.
  double c = 0.0;
  Rational c_h;
  double c_h_reference = 0.0;
  std::string witness_source;
  bool witness_ok = false;
  ReplicationCheck replication;
};

struct ResonancePlan {
  DyadicGrid grid;
  std::vector<BasisSpec> bases;
  LevelSelection selection;
  std::vector<PlanStage> stages;
  /// f and g = sup_k h_k chi_{E_k} on the final grid.
  ClassFunction f;
  ClassFunction g;
};

/// Divergent level-set selection, one witness and one replication per selected set,
/// chained resolutions m_{k+1} = j_k, assembly of g. InfeasibleError reports
/// the achievable depth when the resolution cap is hit.
ResonancePlan build_resonance_function(const StepFunction& f, const std::vector<BasisSpec>& bases,
                                       const GrowthFunction& phi, int depth, const WitnessSource& source,
                                       const PipelineOptions& options = {});

struct DivergenceCurve {
  BasisSpec basis;
  /// |∪_{k<=K} P_{B,k}| counted on the grid, and 1 - ∏(1 - |P_{B,k}|), per K.
  std::vector<Rational> union_mass;
  std::vector<Rational> formula;
  bool matches() const { return union_mass == formula; }
};

struct PlanReport {
  bool chained = false;
  bool measure_bounds = false;
  bool replication = false;
  bool witnesses = false;
  bool uniform = false;
  /// ∫g <= Σ h_k|E_k| <= Σ h_k|A_k| <= ∫f.
  Rational integral_g, sum_h_e, sum_h_a, integral_f;
  bool integral_chain = false;
  std::vector<IndependenceReport> independence;
  std::vector<DivergenceCurve> curves;
  bool independent() const;
  bool ok() const;
};

/// Exact rechecks of the plan invariants and the divergence curves.
PlanReport verify_plan(const ResonancePlan& plan, std::size_t max_subset = 3);

/// The shipped synthetic f: a 16 x 16 grid, value 3k on four disjoint
/// scattered 48-cell sets (k = 1..4) and 1 elsewhere. Deterministic in `seed`.
StepFunction synthetic_resonance_function(std::uint64_t seed = 1);

/// Stage table as JSON (stages[{k, m_k, j_k, h_k, q_k, measure_E_k,
/// bases[{basis, measure_P, verified}]}]).
std::string plan_json(const ResonancePlan& plan, const PlanReport& report);

}  // namespace resonance
