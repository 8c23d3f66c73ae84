// qmod: analytic scaling tools and the Reserve-Commit simulator.
//
//   qmod crossover [scenario.json] [--eta-sweep 0.1,0.01,0.001] [--out file]
//   qmod wall      [scenario.json] [--route-min 80 --route-max 150 --steps 8]
//   qmod bound     [scenario.json] [--tau-q-p 100ns]
//   qmod nops      [scenario.json]
//   qmod simulate  scenario.json --out run_dir [--seed 42]
//   qmod starve    scenario.json --etas 0.001,0.01,0.1,1 [--out file]
//
// Exit codes: 0 success, 2 configuration or parameter error, 3 invariant violation.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qmod/errors.h"
#include "qmod/kernels.h"
#include "qmod/metrics.h"
#include "qmod/records.h"
#include "qmod/scenario_io.h"
#include "qmod/sim_kernel.h"
#include "qmod/timing_bounds.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct Common {
  std::string config;
  std::string out;
  std::string format = "table";
  std::optional<std::uint64_t> seed;
};

qmod::ScenarioFile load_or_default(const std::string& path) {
  if (path.empty()) return {};
  return qmod::load_scenario(path);
}

void emit(const Common& c, const qmod::CommandOutput& out) {
  const std::string& text = c.format == "records" ? out.records : out.table;
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw qmod::ConfigError("cannot write " + c.out);
  f << text;
}

qmod::Nanos duration_flag(const std::optional<std::string>& v, qmod::Nanos fallback) {
  return v ? qmod::parse_duration(*v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modular architecture scaling analysis and Reserve-Commit simulation"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("config", common.config, "Scenario file (JSON)");
    if (config_required) opt->required();
    sub->add_option("--out", common.out, "Output path (file, or directory for simulate)");
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"table", "records"}));
    sub->add_option("--seed", common.seed, "Override the scenario seed");
  };

  // crossover
  auto* crossover = app.add_subcommand("crossover", "Cost curves, crossover scale N_c and eta sensitivity");
  add_common(crossover, false);
  std::optional<double> opt_a, opt_b, opt_eps, opt_gamma, opt_eta;
  std::vector<double> eta_sweep;
  double n_min = 1.0, n_max = 1e12;
  int points = 49;
  crossover->add_option("--A", opt_a, "Homogeneous prefactor");
  crossover->add_option("--B", opt_b, "Interface prefactor");
  crossover->add_option("--epsilon", opt_eps, "Excess geometric exponent");
  crossover->add_option("--gamma", opt_gamma, "Modular routing exponent");
  crossover->add_option("--eta-trans", opt_eta, "Transduction efficiency");
  crossover->add_option("--eta-sweep", eta_sweep, "Eta values for the sensitivity table")->delimiter(',');
  crossover->add_option("--n-min", n_min, "Smallest N on the cost grid");
  crossover->add_option("--n-max", n_max, "Largest N on the cost grid");
  crossover->add_option("--points", points, "Log-spaced grid points");

  // wall / bound share timing overrides
  std::optional<std::string> tau_q, tau_q_p, tau_decode, tau_ff, tau_route;
  std::optional<double> alpha, margin, refractive;
  auto add_timing = [&](CLI::App* sub) {
    sub->add_option("--tau-q", tau_q, "Coherence time, e.g. 100us");
    sub->add_option("--tau-q-p", tau_q_p, "High-percentile coherence deadline");
    sub->add_option("--tau-decode", tau_decode, "Decoder latency");
    sub->add_option("--tau-ff", tau_ff, "Feedforward latency");
    sub->add_option("--tau-route", tau_route, "Routing latency per lattice unit");
    sub->add_option("--alpha", alpha, "Routing elongation factor");
    sub->add_option("--margin", margin, "Safety margin fraction of tau_q");
    sub->add_option("--refractive-index", refractive, "Transmission medium index");
  };

  auto* wall = app.add_subcommand("wall", "Coordination wall, tau_c(N) curve and tau_route sensitivity");
  add_common(wall, false);
  add_timing(wall);
  qmod::RouteRange range;
  wall->add_option("--route-min", range.min_ns, "Sensitivity range start (ns)");
  wall->add_option("--route-max", range.max_ns, "Sensitivity range end (ns)");
  wall->add_option("--steps", range.steps, "Sensitivity points");

  auto* bound = app.add_subcommand("bound", "Causal locality bound on the control radius");
  add_common(bound, false);
  add_timing(bound);

  auto* nops = app.add_subcommand("nops", "Operations per coherence window for platform profiles");
  add_common(nops, false);

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write run artifacts");
  add_common(simulate, true);

  auto* starve = app.add_subcommand("starve", "Abort and commit rates across transduction efficiencies");
  add_common(starve, true);
  std::vector<double> etas{0.001, 0.01, 0.1, 1.0};
  bool serial = false;
  starve->add_option("--etas", etas, "Eta values")->delimiter(',');
  starve->add_flag("--serial", serial, "Run sweep points one after another");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    auto scenario = load_or_default(common.config);
    if (common.seed) {
      scenario.sim.seed = *common.seed;
      scenario.has_seed = true;
    }
    auto timing_with_flags = [&] {
      qmod::TimingParams t = scenario.sim.timing;
      t.tau_q = duration_flag(tau_q, t.tau_q);
      t.tau_q_p = duration_flag(tau_q_p, t.tau_q_p);
      t.tau_decode = duration_flag(tau_decode, t.tau_decode);
      t.tau_ff = duration_flag(tau_ff, t.tau_ff);
      t.tau_route = duration_flag(tau_route, t.tau_route);
      if (alpha) t.alpha = *alpha;
      if (margin) t.safety_margin = *margin;
      if (refractive) t.refractive_index_n = *refractive;
      t.validate();
      return t;
    };

    if (*crossover) {
      qmod::ScalingParams p = scenario.sim.scaling.value_or(qmod::ScalingParams{});
      if (opt_a) p.A = *opt_a;
      if (opt_b) p.B = *opt_b;
      if (opt_eps) p.epsilon = *opt_eps;
      if (opt_gamma) p.gamma = *opt_gamma;
      if (opt_eta) p.eta_trans = *opt_eta;
      const auto grid = qmod::kernels::log_grid(n_min, n_max, points);
      emit(common, qmod::crossover_output(p, grid, eta_sweep));
    } else if (*wall) {
      const auto t = timing_with_flags();
      const auto grid = qmod::kernels::log_grid(1.0, 1e6, 25);
      emit(common, qmod::wall_output(t, grid, range));
    } else if (*bound) {
      emit(common, qmod::bound_output(timing_with_flags()));
    } else if (*nops) {
      const auto& profiles = scenario.profiles.empty() ? qmod::platform_catalog() : scenario.profiles;
      emit(common, qmod::nops_output(profiles));
    } else if (*simulate) {
      if (!scenario.has_seed) throw qmod::ConfigError("simulate needs a seed (scenario \"seed\" or --seed)");
      if (common.out.empty()) throw qmod::ConfigError("simulate needs --out <directory>");
      const auto result = qmod::run_scenario(scenario.sim);
      const auto report = qmod::summarize(result, scenario.sim.timing, scenario.metrics);
      const auto artifacts = qmod::render_run(scenario, result, report);
      qmod::write_run_artifacts(common.out, artifacts);
      std::cout << (common.format == "records" ? artifacts.metrics.records : artifacts.metrics.table);
      if (!result.checks.violations.empty()) {
        for (const auto& v : result.checks.violations) std::cerr << "invariant violation: " << v << '\n';
        return kExitInvariant;
      }
    } else if (*starve) {
      if (!scenario.has_seed) throw qmod::ConfigError("starve needs a seed (scenario \"seed\" or --seed)");
      const auto rows =
          qmod::starvation_curve(scenario.sim, etas, serial ? qmod::Exec::Serial : qmod::Exec::Parallel);
      emit(common, qmod::starvation_output(rows));
    }
  } catch (const qmod::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qmod::BudgetViolated& e) {
    std::cerr << "error: " << e.what() << " (deficit " << e.deficit_ns() << " ns)\n";
    return kExitConfig;
  } catch (const qmod::InfeasibleWall& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qmod::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const qmod::ProtocolViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  }
  return 0;
}
