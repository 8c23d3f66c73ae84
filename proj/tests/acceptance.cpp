// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qmod/kernels.h"
#include "qmod/metrics.h"
#include "qmod/records.h"
#include "qmod/scaling_model.h"
#include "qmod/sim_kernel.h"
#include "qmod/timing_bounds.h"
#include "test_support.h"

namespace fs = std::filesystem;
using namespace qmod;

namespace {

// Tolerances and limits.
constexpr double kWallLo = 8.2e4;
constexpr double kWallHi = 8.5e4;
constexpr double kWall80 = 1.7e5;
constexpr double kWall150 = 4.9e4;
constexpr double kWallRelTol = 0.05;
constexpr double kCrossoverRelTol = 1e-9;
constexpr double kCrossoverClaimFloor = 1e8;
constexpr std::size_t kOrderingDraws = 10'000;
constexpr double kOrderingFactor = 10.0;
constexpr std::uint64_t kDeadlineTxns = 100'000;
constexpr std::uint64_t kRollbackTxns = 10'000;
constexpr std::uint64_t kStarvationTxns = 10'000;
constexpr std::uint64_t kFaultTxns = 10'000;
constexpr double kFaultP = 0.1;
constexpr double kSigmas = 3.0;
constexpr double kLimitFast = 1.0;
constexpr double kLimitOrdering = 10.0;
constexpr double kLimitSim = 60.0;
constexpr double kLimitStarvation = 300.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Paths {
  std::string cli;
  std::string python = "python3";
  fs::path tools;
  fs::path scenarios;
  fs::path work;
};

// Every simulation run in the suite is checked for tuple conservation.
struct ConservationLog {
  std::uint64_t runs = 0;
  std::uint64_t failures = 0;
  std::string first_failure;

  void check(const RunResult& r, const std::string& label) {
    ++runs;
    const auto& c = r.ledger;
    if (c.generated != c.consumed + c.expired + c.available || c.reserved != 0) {
      if (failures++ == 0) {
        first_failure = label + ": generated " + std::to_string(c.generated) + " != consumed " +
                        std::to_string(c.consumed) + " + expired " + std::to_string(c.expired) + " + available " +
                        std::to_string(c.available);
      }
    }
  }

  // Same identity over a serialized metrics record from a CLI run.
  void check(const nlohmann::json& m, const std::string& label) {
    ++runs;
    const auto generated = m["n_generated"].get<std::uint64_t>();
    const auto rest = m["n_consumed"].get<std::uint64_t>() + m["n_expired"].get<std::uint64_t>() +
                      m["n_available_end"].get<std::uint64_t>();
    if (generated != rest && failures++ == 0) first_failure = label + ": serialized counts do not balance";
  }
};

ConservationLog g_conservation;

RunResult run_checked(const SimConfig& c, const std::string& label) {
  auto r = run_scenario(c);
  g_conservation.check(r, label);
  return r;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool within_rel(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

std::vector<nlohmann::json> parse_lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

// Criterion 1: default coordination wall through the wall command output.
Outcome wall_default() {
  const auto out = wall_output(TimingParams{}, kernels::log_grid(1.0, 1e6, 7), RouteRange{});
  for (const auto& rec : parse_lines(out.records)) {
    if (rec["type"] != "wall") continue;
    const double n = rec["wall"].get<double>();
    return {n >= kWallLo && n <= kWallHi, "N* = " + num(n) + " (band [" + num(kWallLo) + ", " + num(kWallHi) + "])"};
  }
  return {false, "no wall record emitted"};
}

// Criterion 2: sensitivity endpoints.
Outcome wall_range() {
  const auto out = wall_output(TimingParams{}, kernels::log_grid(1.0, 1e6, 7), RouteRange{80.0, 150.0, 2});
  double at80 = 0.0;
  double at150 = 0.0;
  for (const auto& rec : parse_lines(out.records)) {
    if (rec["type"] != "wall_sensitivity") continue;
    if (rec["tau_route_ns"].get<double>() == 80.0) at80 = rec["wall"].get<double>();
    if (rec["tau_route_ns"].get<double>() == 150.0) at150 = rec["wall"].get<double>();
  }
  const bool ok = within_rel(at80, kWall80, kWallRelTol) && within_rel(at150, kWall150, kWallRelTol);
  return {ok, "N*(80 ns) = " + num(at80) + ", N*(150 ns) = " + num(at150)};
}

// Criterion 3: crossover scale at two efficiencies.
Outcome crossover_exact() {
  ScalingParams p;
  p.A = 1.0;
  p.B = 100.0;
  p.epsilon = 0.5;
  p.gamma = 1.0;
  p.eta_trans = 0.1;
  const double etas[] = {0.1, 1e-3};
  const auto rows = sweep_crossover(p, etas);
  if (rows.size() != 2 || !rows[0].n_c || !rows[1].n_c) return {false, "crossover absent"};
  const double a = *rows[0].n_c;
  const double b = *rows[1].n_c;
  const bool ok = within_rel(a, 1e6, kCrossoverRelTol) && within_rel(b, 1e10, kCrossoverRelTol) &&
                  b > kCrossoverClaimFloor;
  return {ok, "N_c(0.1) = " + num(a) + ", N_c(1e-3) = " + num(b)};
}

// Criterion 4: random draws, modular below homogeneous past the crossover and above before it.
Outcome crossover_ordering() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<ScalingParams> draws(kOrderingDraws);
  for (auto& d : draws) {
    d.A = std::pow(10.0, -u01(gen));
    d.B = std::pow(10.0, 1.0 + 2.0 * u01(gen));
    d.gamma = 1.0 + u01(gen);
    d.epsilon = d.gamma - 1.0 + 0.1 + 0.9 * u01(gen);
    d.eta_trans = std::pow(10.0, -3.0 * u01(gen));
  }
  const auto par = kernels::parallel::crossover_violations(draws, kOrderingFactor);
  const auto ser = kernels::serial::crossover_violations(draws, kOrderingFactor);
  return {par == 0 && ser == 0,
          std::to_string(draws.size()) + " draws, violations parallel " + std::to_string(par) + " serial " +
              std::to_string(ser)};
}

// Criterion 5: deadline safety with jitter off and multiplier 1.
Outcome deadline_safety() {
  auto c = testing::two_module(2025, 0.1);
  c.timing.tau_q_p = 10'000;
  c.protocol.jitter = 0.0;
  c.protocol.multiplier = 1.0;
  c.workload.max_transactions = kDeadlineTxns;
  c.duration_ns = c.workload.period_ns * static_cast<Nanos>(kDeadlineTxns + 1);
  const auto r = run_checked(c, "deadline safety");
  std::uint64_t late = 0;
  std::uint64_t committed = 0;
  for (const auto& t : r.tuples) late += t.state == TupleState::Consumed && t.retired_ns >= t.deadline_ns;
  for (const auto& t : r.transactions) committed += t.state == TxnState::Committed;
  const auto contract = assert_timing_contract(r, c.timing);
  const bool ok = r.transactions.size() >= kDeadlineTxns && late == 0 && contract.empty() && committed > 0 &&
                  r.checks.violations.empty();
  return {ok, std::to_string(r.transactions.size()) + " txns, " + std::to_string(committed) + " committed, " +
                  std::to_string(late) + " post-deadline consumptions, " + std::to_string(contract.size()) +
                  " contract violations"};
}

// Criterion 6: atomic rollback under contention.
Outcome atomic_rollback() {
  auto c = testing::contention(99);
  c.protocol.retries = 0;
  c.workload.max_transactions = kRollbackTxns;
  c.duration_ns = c.workload.period_ns * static_cast<Nanos>(kRollbackTxns + 1);
  const auto r = run_checked(c, "atomic rollback");
  std::uint64_t temporal = 0;
  std::vector<bool> aborted(r.transactions.size(), false);
  for (const auto& t : r.transactions) {
    if (t.state == TxnState::AbortedTemporal) {
      ++temporal;
      aborted[t.id] = true;
    }
  }
  // Post-hoc: no tuple still names a temporally aborted transaction as its holder.
  std::uint64_t leaked = 0;
  for (const auto& t : r.tuples) leaked += t.owner && *t.owner < aborted.size() && aborted[*t.owner];
  const bool ok = r.transactions.size() >= kRollbackTxns && temporal > 0 && r.ledger.released > 0 &&
                  r.checks.rollback_checks == temporal && r.checks.rollback_violations == 0 &&
                  r.checks.mutual_exclusion_violations == 0 && leaked == 0;
  return {ok, std::to_string(temporal) + " temporal aborts (" + std::to_string(r.ledger.released) +
                  " partial holds released), " + std::to_string(r.checks.rollback_checks) +
                  " snapshot checks, " + std::to_string(r.checks.rollback_violations) + " mismatches, " +
                  std::to_string(leaked) + " leaked holds"};
}

// Criterion 8: abort rate against the expected-supply oracle.
Outcome starvation_monotone() {
  const auto base = testing::starvation(31337, kStarvationTxns);
  const double etas[] = {1e-3, 1e-2, 1e-1, 1.0};
  std::vector<StarvationRow> rows;
  for (double eta : etas) {
    auto c = base;
    for (auto& l : c.links) l.eta_trans = eta;
    const auto r = run_checked(c, "starvation eta=" + num(eta));
    const auto m = summarize(r, c.timing);
    rows.push_back({eta, m.n_transactions, m.abort_rate, m.commit_rate, m.mean_compute_window_ns});
  }
  // Cross-check the sweep entry point against the individual runs.
  const auto swept = starvation_curve(base, etas);

  // Oracle: a transaction created at t reserves at t + query; a tuple generated at
  // g is usable iff g <= t + query and g + tau_q_p > t + query + tau*.
  const auto& p = base.protocol;
  const Nanos classical = static_cast<Nanos>(std::floor(base.timing.alpha * base.timing.tau_route + 0.5));
  const Nanos nominal = p.stages.local_entangle + p.stages.measurement + classical + base.timing.tau_decode +
                        base.timing.tau_ff;
  const Nanos tau_star = static_cast<Nanos>(std::floor(p.multiplier * static_cast<double>(nominal) + 0.5));
  const Nanos period = base.links[0].attempt_period_ns;
  const Nanos t0 = base.workload.start_ns;
  const Nanos reserve_at = t0 + p.stages.query;
  std::int64_t k = 0;
  for (Nanos g = 0; g <= reserve_at; g += period) k += g + base.timing.tau_q_p > reserve_at + tau_star;

  bool ok = true;
  std::string detail = "k=" + std::to_string(k) + ";";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double expected = std::pow(1.0 - rows[i].eta, static_cast<double>(k));
    const double n = static_cast<double>(rows[i].n_transactions);
    const double sigma = std::sqrt(expected * (1.0 - expected) / n);
    const double got = rows[i].abort_rate.value_or(-1.0);
    const bool near = std::abs(got - expected) <= kSigmas * sigma;
    const bool mono = i == 0 || got <= rows[i - 1].abort_rate.value_or(-1.0);
    const bool same = swept[i].abort_rate == rows[i].abort_rate && swept[i].n_transactions == rows[i].n_transactions;
    ok = ok && near && mono && same && rows[i].n_transactions >= kStarvationTxns;
    detail += " eta=" + num(rows[i].eta) + " abort=" + num(got) + " oracle=" + num(expected);
  }
  return {ok, detail};
}

// Criterion 9: external classifier script over a serialized record stream.
Outcome classifier_totality(const Paths& paths) {
  const fs::path out = paths.work / "classifier";
  fs::remove_all(out);
  const fs::path scenario = paths.scenarios / "faults_mixed.json";
  const int sim = run_command(quote(paths.cli) + " simulate " + quote(scenario) + " --out " + quote(out) +
                              " > /dev/null");
  if (sim != 0) return {false, "simulate exited " + std::to_string(sim)};
  const int check = run_command(paths.python + " " + quote(paths.tools / "check_records.py") + " " + quote(out) +
                                " > " + quote(paths.work / "classifier.log") + " 2>&1");
  for (const auto& m : parse_lines(slurp(out / "metrics.jsonl"))) g_conservation.check(m, "classifier run");
  std::uint64_t timeout = 0;
  std::uint64_t loss = 0;
  std::uint64_t unheralded = 0;
  for (const auto& rec : parse_lines(slurp(out / "failures.jsonl"))) {
    timeout += rec["kind"] == "heralded_timeout_abort";
    loss += rec["kind"] == "heralded_physical_loss";
    unheralded += rec["kind"] == "unheralded_decoherence";
  }
  const bool ok = check == 0 && timeout > 0 && loss > 0 && unheralded > 0;
  return {ok, "script exit " + std::to_string(check) + "; timeout " + std::to_string(timeout) + ", loss " +
                  std::to_string(loss) + ", unheralded " + std::to_string(unheralded) + " records"};
}

// Criterion 10: commit fraction under independent stage faults.
Outcome fault_statistics() {
  auto c = testing::two_module(4242, 1.0);
  c.protocol.jitter = 0.0;
  c.faults.p = {kFaultP, kFaultP, kFaultP, kFaultP};
  c.workload.max_transactions = kFaultTxns;
  c.duration_ns = c.workload.period_ns * static_cast<Nanos>(kFaultTxns + 1);
  const auto r = run_checked(c, "fault statistics");
  std::uint64_t eligible = 0;
  std::uint64_t committed = 0;
  for (const auto& t : r.transactions) {
    if (t.commit_start_ns < 0) continue;
    ++eligible;
    committed += t.state == TxnState::Committed;
  }
  const double expected = std::pow(1.0 - kFaultP, 4);
  const double n = static_cast<double>(eligible);
  const double frac = static_cast<double>(committed) / n;
  const double sigma = std::sqrt(expected * (1.0 - expected) / n);
  const bool ok = eligible >= kFaultTxns && std::abs(frac - expected) <= kSigmas * sigma;
  return {ok, std::to_string(eligible) + " eligible, commit fraction " + num(frac) + " vs " + num(expected) +
                  " +- " + num(kSigmas * sigma)};
}

// Criterion 11: byte-identical artifacts per seed through the CLI.
Outcome determinism(const Paths& paths) {
  const fs::path scenario = paths.scenarios / "two_module.json";
  const fs::path a = paths.work / "det_a";
  const fs::path b = paths.work / "det_b";
  const fs::path c = paths.work / "det_c";
  for (const auto& d : {a, b, c}) fs::remove_all(d);
  const std::string base = quote(paths.cli) + " simulate " + quote(scenario) + " --out ";
  if (run_command(base + quote(a) + " > /dev/null") != 0 || run_command(base + quote(b) + " > /dev/null") != 0 ||
      run_command(base + quote(c) + " --seed 43 > /dev/null") != 0) {
    return {false, "simulate failed"};
  }
  for (const auto& d : {a, b, c}) {
    for (const auto& m : parse_lines(slurp(d / "metrics.jsonl"))) g_conservation.check(m, "determinism run");
  }
  bool identical = true;
  bool differs = false;
  for (const char* f : {"transactions.jsonl", "failures.jsonl", "metrics.jsonl", "manifest.jsonl", "transactions.txt",
                        "failures.txt", "metrics.txt", "manifest.txt"}) {
    const auto x = slurp(a / f);
    identical = identical && !x.empty() && x == slurp(b / f);
    differs = differs || x != slurp(c / f);
  }
  return {identical && differs, std::string("same seed identical: ") + (identical ? "yes" : "no") +
                                    ", other seed differs: " + (differs ? "yes" : "no")};
}

// Criterion 12: the three verdict examples.
Outcome threshold_verdicts() {
  const bool a = effective_threshold_check(0.005, 0.0) == ThresholdVerdict::WithinDepolarizingThreshold;
  const bool b = effective_threshold_check(0.02, 0.9) == ThresholdVerdict::WithinErasureRegimeOnly;
  const bool c = effective_threshold_check(0.05, 0.99) == ThresholdVerdict::AboveAllThresholds;
  return {a && b && c, std::string(to_string(effective_threshold_check(0.005, 0.0))) + ", " +
                           to_string(effective_threshold_check(0.02, 0.9)) + ", " +
                           to_string(effective_threshold_check(0.05, 0.99))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  Paths paths;
  app.add_option("--cli", paths.cli, "Path to the qmod executable")->required();
  app.add_option("--python", paths.python, "Python interpreter for the record checker");
  app.add_option("--tools-dir", paths.tools, "Directory holding check_records.py")->required();
  app.add_option("--scenarios", paths.scenarios, "Scenario directory")->required();
  app.add_option("--work", paths.work, "Scratch directory")->required();
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(paths.work);

  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 means no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "coordination wall", kLimitFast, wall_default},
      {2, "wall sensitivity", kLimitFast, wall_range},
      {3, "crossover scale", kLimitFast, crossover_exact},
      {4, "crossover ordering", kLimitOrdering, crossover_ordering},
      {5, "deadline safety", kLimitSim, deadline_safety},
      {6, "atomic rollback", kLimitSim, atomic_rollback},
      {8, "starvation monotonicity", kLimitStarvation, starvation_monotone},
      {9, "classifier totality", 0.0, [&] { return classifier_totality(paths); }},
      {10, "fault-model statistics", 0.0, fault_statistics},
      {11, "determinism", 0.0, [&] { return determinism(paths); }},
      {12, "threshold verdicts", 0.0, threshold_verdicts},
  };

  int failed = 0;
  auto report = [&](int id, const char* name, bool pass, const std::string& detail, double secs) {
    std::printf("criterion %2d %-4s %-24s %s (%.2f s)\n", id, pass ? "PASS" : "FAIL", name, detail.c_str(), secs);
    std::fflush(stdout);
    failed += !pass;
  };

  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0.0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + num(c.limit_s) + " s limit";
    }
    report(c.id, c.name, o.pass, o.detail, secs);
  }

  // Criterion 7 covers every simulation run above.
  const bool conserved = g_conservation.failures == 0 && g_conservation.runs > 0;
  report(7, "conservation", conserved,
         std::to_string(g_conservation.runs) + " runs checked" +
             (conserved ? std::string() : ", first failure: " + g_conservation.first_failure),
         0.0);

  std::printf("%s: %d of 12 criteria failed\n", failed == 0 ? "ACCEPTED" : "REJECTED", failed);
  return failed == 0 ? 0 : 1;
}
