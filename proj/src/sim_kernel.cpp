#include "qmod/sim_kernel.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "qmod/errors.h"
#include "qmod/rng.h"

namespace qmod {

const char* payload_name(const EventPayload& p) {
  static constexpr const char* kNames[] = {"generation_attempt", "transaction_arrival", "stage_complete",
                                           "expire_sweep", "metrics_snapshot"};
  return kNames[p.index()];
}

void EventQueue::push(Nanos time_ns, EventPayload payload) {
  heap_.push(Event{time_ns, next_seq_++, std::move(payload)});
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

namespace {

std::vector<Link> links_for(const std::vector<ModuleId>& participants, const std::vector<Link>& explicit_links) {
  if (!explicit_links.empty()) return explicit_links;
  std::vector<Link> out;
  for (std::size_t k = 0; k + 1 < participants.size(); ++k) out.emplace_back(participants[k], participants[k + 1]);
  return out;
}

void check_participants(const Topology& topo, const std::vector<ModuleId>& participants,
                        const std::vector<Link>& links, const std::string& where) {
  if (participants.size() < 2) throw ConfigError(where + ": a transaction needs at least two participants");
  std::set<ModuleId> seen;
  for (ModuleId m : participants) {
    if (!topo.contains(m)) throw ConfigError(where + ": unknown module " + std::to_string(m));
    if (!seen.insert(m).second) throw ConfigError(where + ": participant listed twice");
  }
  for (const Link& l : links) {
    if (l.a == l.b) throw ConfigError(where + ": required link endpoints must differ");
    if (!seen.count(l.a) || !seen.count(l.b)) {
      throw ConfigError(where + ": required link touches a non-participant module");
    }
  }
}

}  // namespace

Topology SimConfig::build_topology() const {
  if (topology.mode == Topology::Mode::Grid) {
    return Topology::grid(topology.modules, timing.alpha * static_cast<double>(timing.tau_route));
  }
  return Topology::graph(topology.modules, topology.edges);
}

void SimConfig::validate() const {
  if (duration_ns <= 0) throw ConfigError("duration must be positive");
  if (sweep_period_ns <= 0) throw ConfigError("expire sweep period must be positive");
  if (snapshot_period_ns < 0) throw ConfigError("snapshot period must be non-negative");
  timing.validate();
  protocol.validate();
  faults.validate();
  if (scaling) scaling->validate();
  const Topology topo = build_topology();
  for (const auto& link : links) {
    link.validate();
    if (!topo.contains(link.endpoints.a) || !topo.contains(link.endpoints.b)) {
      throw ConfigError("link references an unknown module");
    }
  }
  if (timing.tau_q_p <= 0 && !links.empty()) throw ConfigError("tau_q_p must be positive to generate tuples");
  switch (workload.mode) {
    case WorkloadConfig::Mode::None:
      break;
    case WorkloadConfig::Mode::Periodic:
      if (workload.period_ns <= 0) throw ConfigError("workload period must be positive");
      if (workload.start_ns < 0) throw ConfigError("workload start must be non-negative");
      if (workload.participants.empty()) {
        if (topo.modules().size() < 2) throw ConfigError("random-pair workload needs at least two modules");
        if (!workload.required_links.empty()) throw ConfigError("random-pair workload cannot fix required links");
      } else {
        check_participants(topo, workload.participants, links_for(workload.participants, workload.required_links),
                           "workload");
      }
      break;
    case WorkloadConfig::Mode::Trace:
      for (const auto& a : workload.arrivals) {
        if (a.at_ns < 0) throw ConfigError("trace arrival before time zero");
        check_participants(topo, a.participants, links_for(a.participants, a.required_links), "trace arrival");
      }
      break;
  }
}

namespace {

struct PendingArrival {
  std::vector<ModuleId> participants;
  std::vector<Link> links;
  std::uint32_t attempt = 0;
  std::optional<TxnId> retry_of;
};

class Simulator final : public StageScheduler {
 public:
  Simulator(const SimConfig& config, const RunOptions& options)
      : config_(config),
        options_(options),
        topology_(config.build_topology()),
        ledger_(config.protocol.selection, config.protocol.min_fidelity),
        driver_(config.protocol, config.faults, RandomStream(config.seed, "fault"),
                RandomStream(config.seed, "jitter")),
        workload_rng_(config.seed, "workload") {
    link_rngs_.reserve(config.links.size());
    for (std::size_t k = 0; k < config.links.size(); ++k) {
      link_rngs_.emplace_back(config.seed, "link/" + std::to_string(k));
    }
  }

  void schedule_stage(TxnId txn, int stage, Nanos at_ns) override {
    queue_.push(at_ns, event::StageComplete{txn, stage});
  }

  RunResult run() {
    seed_events();
    while (!queue_.empty()) {
      Event e = queue_.pop();
      now_ = e.time_ns;
      if (options_.record_trace) {
        result_.trace.push_back({e.time_ns, e.seq, static_cast<std::uint8_t>(e.payload.index())});
      }
      std::visit([this](const auto& p) { handle(p); }, e.payload);
    }
    finish();
    return std::move(result_);
  }

 private:
  bool before_end(Nanos t) const { return t < config_.duration_ns; }

  void seed_events() {
    for (std::size_t k = 0; k < config_.links.size(); ++k) queue_.push(0, event::GenerationAttempt{k});
    const auto& w = config_.workload;
    if (w.mode == WorkloadConfig::Mode::Periodic && before_end(w.start_ns)) {
      add_arrival(w.start_ns, {});
    } else if (w.mode == WorkloadConfig::Mode::Trace) {
      for (const auto& a : w.arrivals) {
        if (!before_end(a.at_ns)) continue;
        add_arrival(a.at_ns, {a.participants, links_for(a.participants, a.required_links), 0, std::nullopt});
      }
    }
    queue_.push(0, event::ExpireSweep{});
    if (config_.snapshot_period_ns > 0) queue_.push(0, event::MetricsSnapshot{});
  }

  void add_arrival(Nanos at, PendingArrival spec) {
    arrivals_.push_back(std::move(spec));
    queue_.push(at, event::TransactionArrival{arrivals_.size() - 1});
  }

  void handle(const event::GenerationAttempt& e) {
    ++result_.events.generation_attempts;
    const auto& link = config_.links[e.link];
    if (auto t = attempt_generate(link, now_, config_.timing.tau_q_p, link_rngs_[e.link])) ledger_.insert(*t);
    const Nanos next = now_ + link.attempt_period_ns;
    if (before_end(next)) queue_.push(next, e);
  }

  void handle(const event::TransactionArrival& e) {
    ++result_.events.arrivals;
    PendingArrival spec = arrivals_[e.arrival];
    const auto& w = config_.workload;
    const bool periodic = w.mode == WorkloadConfig::Mode::Periodic && spec.attempt == 0;
    if (periodic) {
      ++periodic_count_;
      if (w.participants.empty()) {
        const auto& mods = topology_.modules();
        const auto i = workload_rng_.below(mods.size());
        auto j = workload_rng_.below(mods.size() - 1);
        if (j >= i) ++j;
        spec.participants = {mods[i].id, mods[j].id};
        spec.links = {Link(mods[i].id, mods[j].id)};
      } else {
        spec.participants = w.participants;
        spec.links = links_for(w.participants, w.required_links);
      }
      const Nanos next = now_ + w.period_ns;
      if (before_end(next) && (!w.max_transactions || periodic_count_ < *w.max_transactions)) add_arrival(next, {});
    }

    Transaction txn;
    txn.id = result_.transactions.size();
    txn.participants = std::move(spec.participants);
    txn.required_links = std::move(spec.links);
    txn.created_ns = now_;
    txn.attempt = spec.attempt;
    txn.retry_of = spec.retry_of;
    txn.stage_nominal = nominal_stage_latencies(txn, topology_, config_.timing, config_.protocol);
    txn.stage = static_cast<int>(Stage::Query);
    result_.transactions.push_back(std::move(txn));
    ++in_flight_;
    schedule_stage(result_.transactions.back().id, static_cast<int>(Stage::Query), now_ + config_.protocol.stages.query);
  }

  void handle(const event::StageComplete& e) {
    ++result_.events.stage_completions;
    sweep();
    Transaction& txn = result_.transactions[e.txn];
    if (e.stage == static_cast<int>(Stage::Query)) {
      run_reserve(txn);
      return;
    }
    const bool was_live = !txn.terminal();
    auto out = driver_.on_stage_complete(txn, ledger_, e.stage, now_, *this);
    append(out.records);
    if (was_live && txn.terminal()) retire(txn);
  }

  void handle(const event::ExpireSweep&) {
    ++result_.events.sweeps;
    sweep();
    const Nanos next = now_ + config_.sweep_period_ns;
    if (before_end(next)) queue_.push(next, event::ExpireSweep{});
  }

  void handle(const event::MetricsSnapshot&) {
    ++result_.events.snapshots;
    result_.snapshots.push_back({now_, ledger_.counts(), in_flight_});
    const Nanos next = now_ + config_.snapshot_period_ns;
    if (before_end(next)) queue_.push(next, event::MetricsSnapshot{});
  }

  void run_reserve(Transaction& txn) {
    const auto estimate = estimate_exec_latency(txn, topology_, config_.timing, config_.protocol,
                                                config_.protocol.multiplier);
    const auto before = ledger_.live_snapshot();
    auto res = reserve_phase(txn, ledger_, now_, estimate, config_.protocol.precheck);
    if (res.reserved) {
      for (TupleId id : txn.reserved_tuples) {
        if (!holders_.emplace(id, txn.id).second) {
          ++result_.checks.mutual_exclusion_violations;
          violation("tuple " + std::to_string(id) + " held by two transactions");
        }
      }
      driver_.commit_phase(txn, *this, now_);
      return;
    }

    ++result_.checks.rollback_checks;
    if (ledger_.live_snapshot() != before) {
      ++result_.checks.rollback_violations;
      violation("txn " + std::to_string(txn.id) + " left the ledger changed after a temporal abort");
    }
    append(res.records);
    retire(txn);
    if (txn.attempt < config_.protocol.retries) {
      const Nanos at = now_ + config_.protocol.retry_spacing;
      if (before_end(at)) add_arrival(at, {txn.participants, txn.required_links, txn.attempt + 1, txn.id});
    }
  }

  void sweep() {
    const auto expired = ledger_.expire_sweep(now_);
    std::set<TxnId> owners;
    for (TupleId id : expired) {
      const auto& t = ledger_.tuple(id);
      if (t.owner) owners.insert(*t.owner);
    }
    for (TxnId owner : owners) {
      Transaction& txn = result_.transactions[owner];
      if (txn.terminal()) continue;
      if (txn.state == TxnState::Committing) ++result_.checks.mid_commit_expiries;
      auto out = driver_.on_tuple_expired(txn, ledger_, now_);
      append(out.records);
      if (txn.terminal()) retire(txn);
    }
  }

  void retire(const Transaction& txn) {
    for (TupleId id : txn.reserved_tuples) holders_.erase(id);
    --in_flight_;
  }

  void append(const std::vector<FailureRecord>& records) {
    result_.records.insert(result_.records.end(), records.begin(), records.end());
  }

  void violation(std::string what) { result_.checks.violations.push_back(std::move(what)); }

  void finish() {
    result_.end_ns = std::max(now_, config_.duration_ns);
    now_ = result_.end_ns;
    sweep();
    if (in_flight_ != 0) violation(std::to_string(in_flight_) + " transactions still in flight after drain");

    result_.ledger = ledger_.counts();
    result_.tuples = ledger_.tuples();
    const auto& c = result_.ledger;
    if (c.generated != c.consumed + c.expired + c.available + c.reserved || c.reserved != 0) {
      violation("tuple conservation failed");
    }
    for (const auto& t : result_.tuples) {
      if (t.state == TupleState::Consumed && t.retired_ns >= t.deadline_ns) {
        ++result_.checks.post_deadline_consumptions;
        violation("tuple " + std::to_string(t.id) + " consumed at or after its deadline");
      }
    }
  }

  const SimConfig& config_;
  const RunOptions& options_;
  Topology topology_;
  Ledger ledger_;
  CommitDriver driver_;
  RandomStream workload_rng_;
  std::vector<RandomStream> link_rngs_;
  EventQueue queue_;
  std::vector<PendingArrival> arrivals_;
  std::map<TupleId, TxnId> holders_;
  std::uint64_t periodic_count_ = 0;
  std::uint64_t in_flight_ = 0;
  Nanos now_ = 0;
  RunResult result_;
};

}  // namespace

RunResult run_scenario(const SimConfig& config, const RunOptions& options) {
  config.validate();
  Simulator sim(config, options);
  return sim.run();
}

std::vector<TimingContractViolation> assert_timing_contract(const RunResult& result, const TimingParams& timing) {
  std::vector<TimingContractViolation> out;
  for (const auto& txn : result.transactions) {
    if (txn.state == TxnState::Committed && txn.coordination_ns >= timing.tau_q_p) {
      out.push_back({txn.id, txn.coordination_ns});
    }
  }
  return out;
}

}  // namespace qmod
