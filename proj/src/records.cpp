#include "qmod/records.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qmod/errors.h"
#include "qmod/kernels.h"

namespace qmod {

using nlohmann::ordered_json;

namespace {

ordered_json header(const char* type) {
  ordered_json j;
  j["schema"] = kRecordSchemaVersion;
  j["type"] = type;
  return j;
}

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

bool heralded(FailureKind k) {
  return k == FailureKind::HeraldedTimeoutAbort || k == FailureKind::HeraldedPhysicalLoss;
}

std::string join_modules(const std::vector<ModuleId>& ids) {
  std::string out;
  for (std::size_t k = 0; k < ids.size(); ++k) out += (k ? "," : "") + std::to_string(ids[k]);
  return out;
}

}  // namespace

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_exact(double v) { return ordered_json(v).dump(); }

std::string fmt_optional(const std::optional<double>& v, const char* absent) { return v ? fmt_real(*v) : absent; }

void TextTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != headers_.size()) throw std::logic_error("table row width mismatch");
  rows_.push_back(std::move(cells));
}

std::string TextTable::render() const {
  std::vector<std::size_t> width(headers_.size());
  for (std::size_t c = 0; c < headers_.size(); ++c) width[c] = headers_[c].size();
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << cells[c];
      if (c + 1 < cells.size()) out << std::string(width[c] - cells[c].size() + 2, ' ');
    }
    out << '\n';
  };
  line(headers_);
  std::vector<std::string> rule;
  for (std::size_t w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& row : rows_) line(row);
  return out.str();
}

ordered_json transaction_record(const Transaction& txn) {
  ordered_json j = header("txn");
  j["id"] = txn.id;
  j["state"] = to_string(txn.state);
  j["abort_reason"] = to_string(txn.abort_reason);
  j["participants"] = txn.participants;
  ordered_json links = ordered_json::array();
  for (const Link& l : txn.required_links) links.push_back({l.a, l.b});
  j["links"] = links;
  j["tuples"] = txn.reserved_tuples;
  j["created_ns"] = txn.created_ns;
  j["reserve_ns"] = txn.reserve_ns;
  j["commit_start_ns"] = txn.commit_start_ns;
  j["finished_ns"] = txn.finished_ns;
  j["tau_exec_star_ns"] = txn.estimate.tau_exec_star_ns;
  j["nominal_ns"] = txn.estimate.nominal_ns;
  j["coordination_ns"] = txn.coordination_ns;
  j["tau_p_ns"] = protocol_latency(txn);
  j["attempt"] = txn.attempt;
  j["retry_of"] = txn.retry_of ? ordered_json(*txn.retry_of) : ordered_json(nullptr);
  return j;
}

ordered_json failure_record(const FailureRecord& rec) {
  ordered_json j = header("failure");
  j["txn"] = rec.txn;
  j["module"] = rec.module;
  j["kind"] = to_string(rec.kind);
  j["classification"] = to_string(rec.classification);
  j["heralded"] = heralded(rec.kind);
  j["time_ns"] = rec.time_ns;
  j["window_ns"] = rec.window_ns;
  j["known_initialization"] = rec.known_initialization;
  return j;
}

ordered_json metrics_record(const MetricsReport& r) {
  ordered_json j = header("metrics");
  j["n_transactions"] = r.n_transactions;
  j["n_committed"] = r.n_committed;
  j["n_aborted_temporal"] = r.n_aborted_temporal;
  j["n_aborted_physical"] = r.n_aborted_physical;
  j["n_generated"] = r.n_generated;
  j["n_consumed"] = r.n_consumed;
  j["n_expired"] = r.n_expired;
  j["n_available_end"] = r.n_available_end;
  j["n_released"] = r.n_released;
  j["abort_rate"] = optional_json(r.abort_rate);
  j["commit_rate"] = optional_json(r.commit_rate);
  j["mean_tau_c_realized_ns"] = optional_json(r.mean_tau_c_realized_ns);
  j["mean_tau_p_ns"] = optional_json(r.mean_tau_p_ns);
  j["mean_compute_window_ns"] = optional_json(r.mean_compute_window_ns);
  j["n_infeasible_windows"] = r.n_infeasible_windows;
  j["n_records"] = r.n_records;
  j["n_erasure_records"] = r.n_erasure_records;
  j["n_depolarizing_records"] = r.n_depolarizing_records;
  j["n_pauli_records"] = r.n_pauli_records;
  j["erasure_fraction"] = optional_json(r.erasure_fraction);
  j["depolarizing_fraction"] = optional_json(r.depolarizing_fraction);
  j["residual_depolarizing_rate"] = r.residual_depolarizing_rate;
  j["threshold_verdict"] = to_string(r.threshold_verdict);
  return j;
}

ordered_json manifest_record(const ScenarioFile& scenario, const RunResult& result) {
  ordered_json j = header("manifest");
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["config_hash"] = config_hash(scenario);
  j["seed"] = scenario.sim.seed;
  j["duration_ns"] = scenario.sim.duration_ns;
  j["end_ns"] = result.end_ns;
  j["events"] = result.events.total();
  j["invariant_violations"] = result.checks.violations.size();
  return j;
}

std::string to_lines(const std::vector<ordered_json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

RunArtifacts render_run(const ScenarioFile& scenario, const RunResult& result, const MetricsReport& report) {
  RunArtifacts a;

  const auto m = metrics_record(report);
  a.metrics.records = to_lines({m});
  TextTable mt({"metric", "value"});
  for (const auto& [key, value] : m.items()) {
    if (key == "schema" || key == "type") continue;
    mt.add_row({key, value.is_string() ? value.get<std::string>() : value.dump()});
  }
  a.metrics.table = mt.render();

  std::vector<ordered_json> txns;
  TextTable tt({"id", "state", "reason", "participants", "created_ns", "finished_ns", "tau_exec_star_ns",
                "coordination_ns", "tau_p_ns"});
  for (const auto& txn : result.transactions) {
    txns.push_back(transaction_record(txn));
    tt.add_row({std::to_string(txn.id), to_string(txn.state), to_string(txn.abort_reason),
                join_modules(txn.participants), std::to_string(txn.created_ns), std::to_string(txn.finished_ns),
                std::to_string(txn.estimate.tau_exec_star_ns), std::to_string(txn.coordination_ns),
                std::to_string(protocol_latency(txn))});
  }
  a.transactions.records = to_lines(txns);
  a.transactions.table = tt.render();

  std::vector<ordered_json> fails;
  TextTable ft({"txn", "module", "kind", "classification", "time_ns", "window_ns"});
  for (const auto& rec : result.records) {
    fails.push_back(failure_record(rec));
    ft.add_row({std::to_string(rec.txn), std::to_string(rec.module), to_string(rec.kind), to_string(rec.classification),
                std::to_string(rec.time_ns), std::to_string(rec.window_ns)});
  }
  a.failures.records = to_lines(fails);
  a.failures.table = ft.render();

  const auto man = manifest_record(scenario, result);
  a.manifest.records = to_lines({man});
  TextTable nt({"field", "value"});
  for (const auto& [key, value] : man.items()) {
    if (key == "schema" || key == "type") continue;
    nt.add_row({key, value.is_string() ? value.get<std::string>() : value.dump()});
  }
  for (const auto& v : result.checks.violations) nt.add_row({"violation", v});
  a.manifest.table = nt.render();
  return a;
}

void write_run_artifacts(const std::filesystem::path& dir, const RunArtifacts& artifacts) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* stem, const CommandOutput& out) {
    for (const auto& [ext, text] : {std::pair{".jsonl", &out.records}, std::pair{".txt", &out.table}}) {
      std::ofstream f(dir / (std::string(stem) + ext), std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + (dir / (std::string(stem) + ext)).string());
      f << *text;
    }
  };
  put("metrics", artifacts.metrics);
  put("transactions", artifacts.transactions);
  put("failures", artifacts.failures);
  put("manifest", artifacts.manifest);
}

CommandOutput crossover_output(const ScalingParams& params, std::span<const double> n_grid,
                               std::span<const double> eta_sweep) {
  params.validate();
  CommandOutput out;
  std::vector<ordered_json> recs;
  TextTable curve({"N", "C_hom", "C_mod", "N_logical"});
  for (const auto& s : kernels::parallel::cost_curve(params, n_grid)) {
    curve.add_row({fmt_real(s.n), fmt_real(s.homogeneous), fmt_real(s.modular), fmt_real(logical_equivalent(params, s.n))});
    ordered_json j = header("cost_sample");
    j["n"] = s.n;
    j["c_hom"] = s.homogeneous;
    j["c_mod"] = s.modular;
    recs.push_back(j);
  }

  const auto nc = crossover_scale(params);
  TextTable summary({"A", "B", "epsilon", "gamma", "eta_trans", "condition", "N_c", "N_c_rounded", "N_c_logical"});
  summary.add_row({fmt_real(params.A), fmt_real(params.B), fmt_real(params.epsilon), fmt_real(params.gamma),
                   fmt_real(params.eta_trans), crossover_condition(params) ? "true" : "false",
                   nc ? fmt_exact(*nc) : "none", nc ? fmt_real(std::round(*nc)) : "none",
                   nc ? fmt_real(logical_equivalent(params, *nc)) : "none"});
  ordered_json cj = header("crossover");
  cj["A"] = params.A;
  cj["B"] = params.B;
  cj["epsilon"] = params.epsilon;
  cj["gamma"] = params.gamma;
  cj["eta_trans"] = params.eta_trans;
  cj["condition"] = crossover_condition(params);
  cj["n_c"] = optional_json(nc);
  cj["n_c_logical"] = nc ? ordered_json(logical_equivalent(params, *nc)) : ordered_json(nullptr);
  recs.push_back(cj);

  out.table = "# crossover\n" + summary.render();
  if (!eta_sweep.empty()) {
    TextTable sweep({"eta", "N_c"});
    for (const auto& row : sweep_crossover(params, eta_sweep)) {
      sweep.add_row({fmt_real(row.eta), row.n_c ? fmt_exact(*row.n_c) : "none"});
      ordered_json j = header("eta_sweep");
      j["eta"] = row.eta;
      j["n_c"] = optional_json(row.n_c);
      recs.push_back(j);
    }
    out.table += "\n# eta sweep\n" + sweep.render();
  }
  out.table += "\n# cost curve\n" + curve.render();
  out.records = to_lines(recs);
  return out;
}

CommandOutput wall_output(const TimingParams& timing, std::span<const double> n_grid, const RouteRange& range) {
  timing.validate();
  CommandOutput out;
  std::vector<ordered_json> recs;
  const double wall = coordination_wall(timing);
  TextTable summary({"tau_q_ns", "safety_margin", "tau_decode_ns", "tau_ff_ns", "alpha", "tau_route_ns", "wall_N"});
  summary.add_row({std::to_string(timing.tau_q), fmt_real(timing.safety_margin), std::to_string(timing.tau_decode),
                   std::to_string(timing.tau_ff), fmt_real(timing.alpha), std::to_string(timing.tau_route),
                   fmt_real(wall)});
  ordered_json wj = header("wall");
  wj["tau_route_ns"] = timing.tau_route;
  wj["wall"] = wall;
  recs.push_back(wj);

  TextTable sens({"tau_route_ns", "wall_N"});
  for (const auto& row : wall_sensitivity(timing, range.min_ns, range.max_ns, range.steps)) {
    sens.add_row({fmt_real(row.tau_route_ns), fmt_real(row.wall)});
    ordered_json j = header("wall_sensitivity");
    j["tau_route_ns"] = row.tau_route_ns;
    j["wall"] = row.wall;
    recs.push_back(j);
  }

  TextTable curve({"N", "tau_c_ns"});
  const auto lat = kernels::parallel::latency_curve(timing, n_grid);
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    curve.add_row({fmt_real(n_grid[k]), fmt_real(lat[k])});
    ordered_json j = header("latency_sample");
    j["n"] = n_grid[k];
    j["tau_c_ns"] = lat[k];
    recs.push_back(j);
  }
  out.table = "# coordination wall\n" + summary.render() + "\n# sensitivity\n" + sens.render() +
              "\n# tau_c(N)\n" + curve.render();
  out.records = to_lines(recs);
  return out;
}

CommandOutput bound_output(const TimingParams& timing) {
  const double radius = locality_bound(timing);
  CommandOutput out;
  TextTable t({"tau_q_p_ns", "tau_decode_ns", "tau_ff_ns", "refractive_index", "L_ctrl_max_m"});
  t.add_row({std::to_string(timing.tau_q_p), std::to_string(timing.tau_decode), std::to_string(timing.tau_ff),
             fmt_real(timing.refractive_index_n), fmt_real(radius)});
  out.table = t.render();
  ordered_json j = header("locality_bound");
  j["tau_q_p_ns"] = timing.tau_q_p;
  j["tau_decode_ns"] = timing.tau_decode;
  j["tau_ff_ns"] = timing.tau_ff;
  j["refractive_index"] = timing.refractive_index_n;
  j["light_speed"] = timing.light_speed_c;
  j["l_ctrl_max_m"] = radius;
  out.records = to_lines({j});
  return out;
}

CommandOutput nops_output(std::span<const PlatformProfile> profiles) {
  CommandOutput out;
  std::vector<ordered_json> recs;
  TextTable t({"platform", "tau_q_s", "tau_gate_s", "n_ops_min", "n_ops_max", "printed"});
  for (const auto& p : profiles) {
    const auto ops = ops_per_coherence(p);
    const std::string gate = p.tau_gate_min ? fmt_real(*p.tau_gate_min) + "-" + fmt_real(*p.tau_gate_max) : "n/a";
    t.add_row({p.name, fmt_real(p.tau_q_min) + "-" + fmt_real(p.tau_q_max), gate,
               ops ? fmt_real(ops->n_ops_min) : "no gate time", ops ? fmt_real(ops->n_ops_max) : "no gate time",
               p.printed_n_ops});
    ordered_json j = header("n_ops");
    j["platform"] = p.name;
    j["n_ops_min"] = ops ? ordered_json(ops->n_ops_min) : ordered_json(nullptr);
    j["n_ops_max"] = ops ? ordered_json(ops->n_ops_max) : ordered_json(nullptr);
    j["printed"] = p.printed_n_ops;
    recs.push_back(j);
  }
  out.table = t.render();
  out.records = to_lines(recs);
  return out;
}

CommandOutput starvation_output(std::span<const StarvationRow> rows) {
  CommandOutput out;
  std::vector<ordered_json> recs;
  TextTable t({"eta", "transactions", "abort_rate", "commit_rate", "mean_compute_window_ns"});
  for (const auto& r : rows) {
    t.add_row({fmt_real(r.eta), std::to_string(r.n_transactions), fmt_optional(r.abort_rate, "n/a"),
               fmt_optional(r.commit_rate, "n/a"), fmt_optional(r.mean_compute_window_ns, "n/a")});
    ordered_json j = header("starvation");
    j["eta"] = r.eta;
    j["n_transactions"] = r.n_transactions;
    j["abort_rate"] = optional_json(r.abort_rate);
    j["commit_rate"] = optional_json(r.commit_rate);
    j["mean_compute_window_ns"] = optional_json(r.mean_compute_window_ns);
    recs.push_back(j);
  }
  out.table = t.render();
  out.records = to_lines(recs);
  return out;
}

}  // namespace qmod
