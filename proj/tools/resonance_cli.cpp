#include "resonance/errors.hpp"
#include "resonance/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace resonance;

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kInfeasible = 3, kVerification = 4 };

struct Common {
  std::string config;
  std::string grid;
  std::string out;
  std::string mode;
  std::string seed;
  std::vector<std::string> sets;
  bool no_cache = false;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key = value config file");
  app->add_option("--grid", c.grid, "cells per axis (grid or resolution cap)");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--mode", c.mode, "rational | double")->check(CLI::IsMember({"rational", "double"}));
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--set", c.sets, "extra key=value override (repeatable)");
  app->add_flag("--no-cache", c.no_cache, "ignore and do not write the result cache");
  app->add_flag("-q,--quiet", c.quiet, "print only the verdict");
}

int run(ExperimentKind kind, const Common& c) {
  ExperimentConfig config;
  try {
    ConfigKeys keys;
    if (!c.config.empty()) keys = read_config_file(c.config);
    for (const auto& s : c.sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got " + s);
      keys[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (!c.grid.empty()) keys["grid"] = c.grid;
    if (!c.out.empty()) keys["out"] = c.out;
    if (!c.mode.empty()) keys["mode"] = c.mode;
    if (!c.seed.empty()) keys["seed"] = c.seed;
    if (c.no_cache) keys["cache"] = "false";
    config = make_config(kind, keys);
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    RunReport report = run_experiment(config);
    write_report(report, config.out_dir);
    if (!c.quiet)
      for (const auto& v : report.verified)
        std::cout << (v.passed ? "ok    " : "FAIL  ") << v.name << (v.detail.empty() ? "" : "  (" + v.detail + ")")
                  << '\n';
    std::cout << experiment_name(kind) << ": " << (report.all_verified() ? "verified" : "VERIFICATION FAILED")
              << (report.cache_hit ? " (cached)" : "") << ", report in " << config.out_dir << '\n';
    return report.all_verified() ? kOk : kVerification;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what();
    if (e.achievable_depth() >= 0) std::cerr << " (achievable depth " << e.achievable_depth() << ")";
    if (e.required_resolution() >= 0) std::cerr << " (required resolution 2^" << e.required_resolution() << ")";
    std::cerr << '\n';
    return kInfeasible;
  } catch (const VerificationError& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kVerification;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximal-operator experiments: halo sweeps, lemma checks, resonance constructions"};
  app.require_subcommand(1);
  Common common;
  struct Sub {
    const char* name;
    const char* help;
    ExperimentKind kind;
  };
  const Sub subs[] = {
      {"halo", "halo function sweep over h", ExperimentKind::Halo},
      {"lemmas", "log-integral and interval level-set checks", ExperimentKind::Lemmas},
      {"zygmund", "staged construction against a family of rotated bases", ExperimentKind::Zygmund},
      {"resonance", "staged construction for one axis basis", ExperimentKind::Resonance},
      {"rearrange", "measure preserving rearrangement of the synthetic function", ExperimentKind::Rearrange},
      {"maxfield", "maximal function of a grid file or random instance", ExperimentKind::MaxField},
  };
  int code = kOk;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, common);
    const ExperimentKind kind = s.kind;
    sub->callback([&code, &common, kind] { code = run(kind, common); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }
  return code;
}
