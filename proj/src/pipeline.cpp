#include "resonance/pipeline.hpp"

#include "resonance/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>

namespace resonance {

WitnessSource ball_witness_source(const BallTemplate& tpl, const GrowthFunction& phi,
                                  const RotatedSampling& sampling) {
  WitnessSource src;
  src.name = tpl.mode == WitnessMode::Faithful ? "ball-faithful" : "ball-clip";
  const Rational density = ball_density(tpl);
  src.density = [density](double) { return density; };
  src.build = [tpl, phi, sampling, density](const WitnessRequest& req) {
    const DyadicGrid cube = DyadicGrid::cube(2, tpl.bits);
    const std::int64_t N = cube.cells_along(0);
    const auto hq = static_cast<std::int64_t>(tpl.r_cells * (1 + tpl.t));
    AxisRect q{{N / 2 - hq, N / 2 - hq}, {N / 2 + hq, N / 2 + hq}};
    BallTemplate scaled = tpl;
    scaled.side = to_double(replication_template_side(cube, q, density, req.delta, req.m));
    const bool all_rotated =
        std::all_of(req.bases.begin(), req.bases.end(), [](const BasisSpec& b) { return b.is_rotated(); });
    if (all_rotated) {
      std::vector<double> gammas;
      for (const auto& b : req.bases) gammas.push_back(b.gamma);
      return mphi_witness_for_rotations(gammas, req.h, req.eps, scaled, phi, sampling);
    }
    return ball_witness(req.bases, req.h, req.eps, scaled, phi, sampling);
  };
  return src;
}

ResonancePlan build_resonance_function(const StepFunction& f, const std::vector<BasisSpec>& bases,
                                       const GrowthFunction& phi, int depth, const WitnessSource& source,
                                       const PipelineOptions& options) {
  if (bases.empty()) throw InvalidArgument("basis list is empty");
  if (!f.grid().is_unit_cube()) throw InvalidArgument("f must live on the unit cube");
  const int n = f.grid().dim();
  const auto& res = f.grid().resolution();
  for (int a = 1; a < n; ++a)
    if (res[a] != res[0]) throw InvalidArgument("f must use an isotropic grid");

  ResonancePlan plan;
  plan.bases = bases;
  SizeCap alpha = [&](double x) { return to_double(source.density(x)); };
  plan.selection = build_divergent_sequences(phi, f, alpha, depth, options.target_scale);

  int m = 0;
  std::vector<GridSet> stage_e;
  std::vector<std::vector<GridSet>> stage_p;
  for (std::size_t l = 0; l < plan.selection.size(); ++l) {
    PlanStage st;
    st.k = static_cast<int>(l) + 1;
    st.h = plan.selection.h[l];
    st.q = plan.selection.q[l];
    st.delta = plan.selection.sets[l].normalized_measure();
    st.eps = options.eps_scale / st.k;
    st.m = m;

    WitnessRequest req{st.h / st.q, st.eps, st.k, st.delta, m, bases};
    MPhiWitness w = source.build(req);
    st.witness_ok = verify_witness(w).ok();
    st.c = w.c;
    st.c_h = w.c_h;
    st.c_h_reference = w.c_h_reference;
    st.witness_source = w.source;
    st.truncation = w.truncation;

    const int j = replication_bits(w, st.delta, m);
    if (j > options.max_bits)
      throw InfeasibleError("stage " + std::to_string(st.k) + " needs resolution " + std::to_string(j) +
                                " beyond the cap",
                            static_cast<int>(l), j);
    Replication rep = replicate_configuration(w, st.delta, m, options.max_bits);
    st.replication = verify_replication(rep, w, st.delta, m);
    st.i = rep.i;
    st.j = rep.j;
    m = rep.j;
    stage_e.push_back(std::move(rep.e));
    stage_p.push_back(std::move(rep.p));
    plan.stages.push_back(std::move(st));
  }

  plan.grid = DyadicGrid::cube(n, m);
  for (std::size_t l = 0; l < plan.stages.size(); ++l) {
    auto& st = plan.stages[l];
    st.e = stage_e[l].grid() == plan.grid ? std::move(stage_e[l]) : stage_e[l].refined(plan.grid);
    for (auto& p : stage_p[l]) st.p.push_back(p.grid() == plan.grid ? std::move(p) : p.refined(plan.grid));
  }

  plan.f = ClassFunction::from_step(f, plan.grid);
  plan.g = ClassFunction(plan.grid, Rational(0));
  for (const auto& st : plan.stages) {
    const std::uint16_t c = plan.g.class_of(st.h);
    st.e.for_each([&](std::size_t i) {
      if (plan.g.value(i) < st.h) plan.g.cls[i] = c;
    });
  }
  return plan;
}

bool PlanReport::independent() const {
  for (const auto& r : independence)
    if (!r.all_hold()) return false;
  return true;
}

bool PlanReport::ok() const {
  if (!(chained && measure_bounds && replication && witnesses && uniform && integral_chain && independent()))
    return false;
  for (const auto& c : curves)
    if (!c.matches()) return false;
  return true;
}

PlanReport verify_plan(const ResonancePlan& plan, std::size_t max_subset) {
  PlanReport r;
  const int n = plan.grid.dim();
  r.chained = r.measure_bounds = r.replication = r.witnesses = r.uniform = true;
  r.sum_h_e = r.sum_h_a = Rational(0);
  std::vector<int> coarse, fine;
  for (std::size_t l = 0; l < plan.stages.size(); ++l) {
    const auto& st = plan.stages[l];
    if (st.m > st.j) r.chained = false;
    if (l + 1 < plan.stages.size() && st.j > plan.stages[l + 1].m) r.chained = false;
    coarse.push_back(st.m);
    fine.push_back(st.j);
    const Rational me = st.e.normalized_measure();
    if (me > st.delta || me < st.delta / pow2(2 * n)) r.measure_bounds = false;
    if (!st.replication.ok()) r.replication = false;
    if (!st.replication.uniform) r.uniform = false;
    if (!st.witness_ok) r.witnesses = false;
    r.sum_h_e += st.h * st.e.measure();
    r.sum_h_a += st.h * plan.selection.sets[l].measure();
  }
  r.integral_g = plan.g.integral();
  r.integral_f = plan.f.integral();
  r.integral_chain = r.integral_g <= r.sum_h_e && r.sum_h_e <= r.sum_h_a && r.sum_h_a <= r.integral_f;

  for (std::size_t b = 0; b < plan.bases.size(); ++b) {
    std::vector<GridSet> sets;
    for (const auto& st : plan.stages) sets.push_back(st.p[b]);
    r.independence.push_back(check_independence(sets, max_subset, coarse, fine));

    DivergenceCurve curve;
    curve.basis = plan.bases[b];
    GridSet acc(plan.grid);
    Rational miss(1);
    for (const auto& s : sets) {
      acc = set_union(acc, s);
      miss *= Rational(1) - s.normalized_measure();
      curve.union_mass.push_back(acc.normalized_measure());
      curve.formula.push_back(Rational(1) - miss);
    }
    r.curves.push_back(std::move(curve));
  }
  return r;
}

StepFunction synthetic_resonance_function(std::uint64_t seed) {
  DyadicGrid g = DyadicGrid::cube(2, 4);
  std::vector<std::size_t> order(g.cell_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
  std::vector<Rational> v(g.cell_count(), Rational(1));
  for (int k = 1; k <= 4; ++k)
    for (std::size_t p = 0; p < 48; ++p) v[order[(k - 1) * 48 + p]] = Rational(3 * k);
  return StepFunction::from_rationals(g, std::move(v));
}

std::string plan_json(const ResonancePlan& plan, const PlanReport& report) {
  using nlohmann::json;
  json stages = json::array();
  for (std::size_t l = 0; l < plan.stages.size(); ++l) {
    const auto& st = plan.stages[l];
    json per = json::array();
    for (std::size_t b = 0; b < plan.bases.size(); ++b) {
      per.push_back({{"basis", plan.bases[b].describe()},
                     {"measure_P", to_string(st.p[b].normalized_measure())},
                     {"verified", st.replication.contained && st.witness_ok}});
    }
    stages.push_back({{"k", st.k},
                      {"m_k", st.m},
                      {"i_k", st.i},
                      {"j_k", st.j},
                      {"h_k", to_string(st.h)},
                      {"q_k", st.q},
                      {"eps_k", st.eps},
                      {"measure_A_k", to_string(st.delta)},
                      {"measure_E_k", to_string(st.e.normalized_measure())},
                      {"c", st.c},
                      {"c_h", to_string(st.c_h)},
                      {"c_h_reference", st.c_h_reference},
                      {"witness", st.witness_source},
                      {"uniform", st.replication.uniform},
                      {"bases", per}});
  }
  json curves = json::array();
  for (const auto& c : report.curves) {
    json masses = json::array();
    for (std::size_t k = 0; k < c.union_mass.size(); ++k)
      masses.push_back({{"K", k + 1},
                        {"union", to_string(c.union_mass[k])},
                        {"formula", to_string(c.formula[k])},
                        {"union_double", to_double(c.union_mass[k])}});
    curves.push_back({{"basis", c.basis.describe()}, {"masses", masses}, {"exact_match", c.matches()}});
  }
  json out = {{"grid", plan.grid.describe()},
              {"stages", stages},
              {"divergence", curves},
              {"integral_g", to_string(report.integral_g)},
              {"sum_h_E", to_string(report.sum_h_e)},
              {"sum_h_A", to_string(report.sum_h_a)},
              {"integral_f", to_string(report.integral_f)},
              {"checks",
               {{"chained", report.chained},
                {"measure_bounds", report.measure_bounds},
                {"replication", report.replication},
                {"witnesses", report.witnesses},
                {"uniform", report.uniform},
                {"integral_chain", report.integral_chain},
                {"independence", report.independent()}}}};
  return out.dump(2);
}

}  // namespace resonance
