#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "qmod/ledger.h"
#include "qmod/protocol.h"
#include "qmod/scaling_model.h"
#include "qmod/timing_bounds.h"
#include "qmod/topology.h"

namespace qmod {

namespace event {
struct GenerationAttempt {
  std::size_t link = 0;  // index into SimConfig::links
};
struct TransactionArrival {
  std::size_t arrival = 0;  // index into the kernel's arrival table
};
struct StageComplete {
  TxnId txn = 0;
  int stage = 0;
};
struct ExpireSweep {};
struct MetricsSnapshot {};
}  // namespace event

using EventPayload = std::variant<event::GenerationAttempt, event::TransactionArrival, event::StageComplete,
                                  event::ExpireSweep, event::MetricsSnapshot>;

const char* payload_name(const EventPayload& p);

struct Event {
  Nanos time_ns = 0;
  std::uint64_t seq = 0;
  EventPayload payload;
};

// Min-queue on (time_ns, seq). seq is assigned at push, so simultaneous events pop FIFO.
class EventQueue {
 public:
  void push(Nanos time_ns, EventPayload payload);
  Event pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      return x.time_ns != y.time_ns ? x.time_ns > y.time_ns : x.seq > y.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

struct TopologyConfig {
  Topology::Mode mode = Topology::Mode::Grid;
  std::vector<ModuleSpec> modules;
  std::vector<EdgeSpec> edges;  // graph mode
};

struct ArrivalSpec {
  Nanos at_ns = 0;
  std::vector<ModuleId> participants;
  std::vector<Link> required_links;  // empty: consecutive participant pairs
};

struct WorkloadConfig {
  enum class Mode { None, Periodic, Trace };
  Mode mode = Mode::None;
  Nanos period_ns = 0;
  Nanos start_ns = 0;
  // Periodic mode: empty participants draws a uniformly random pair of
  // distinct modules per arrival; otherwise every arrival uses these.
  std::vector<ModuleId> participants;
  std::vector<Link> required_links;
  std::optional<std::uint64_t> max_transactions;
  std::vector<ArrivalSpec> arrivals;  // trace mode
};

struct SimConfig {
  TopologyConfig topology;
  TimingParams timing;
  std::vector<LinkConfig> links;
  WorkloadConfig workload;
  FaultModel faults;
  ProtocolSettings protocol;
  Nanos duration_ns = 0;
  std::uint64_t seed = 0;
  Nanos sweep_period_ns = 1000;
  Nanos snapshot_period_ns = 0;  // 0 disables periodic snapshots
  std::optional<ScalingParams> scaling;  // carried for analytic commands

  // Throws ConfigError; called by run_scenario before any event executes.
  void validate() const;
  // Grid mode uses alpha * tau_route per lattice unit.
  Topology build_topology() const;
};

struct Snapshot {
  Nanos time_ns = 0;
  LedgerCounts ledger;
  std::uint64_t in_flight = 0;
};

struct RunChecks {
  std::uint64_t rollback_checks = 0;
  std::uint64_t rollback_violations = 0;
  std::uint64_t mutual_exclusion_violations = 0;
  std::uint64_t post_deadline_consumptions = 0;
  std::uint64_t mid_commit_expiries = 0;
  std::vector<std::string> violations;  // human-readable, empty on a clean run
};

struct EventCounts {
  std::uint64_t generation_attempts = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t stage_completions = 0;
  std::uint64_t sweeps = 0;
  std::uint64_t snapshots = 0;
  std::uint64_t total() const { return generation_attempts + arrivals + stage_completions + sweeps + snapshots; }
};

struct TraceEntry {
  Nanos time_ns;
  std::uint64_t seq;
  std::uint8_t kind;  // EventPayload index
  bool operator==(const TraceEntry&) const = default;
};

struct RunResult {
  std::vector<Transaction> transactions;  // indexed by TxnId
  std::vector<FailureRecord> records;     // emission order
  std::vector<EntanglementTuple> tuples;  // ledger snapshot at end of run
  LedgerCounts ledger;
  EventCounts events;
  RunChecks checks;
  std::vector<Snapshot> snapshots;
  std::vector<TraceEntry> trace;  // only with RunOptions::record_trace
  Nanos end_ns = 0;
};

struct RunOptions {
  bool record_trace = false;
};

// Executes every event before duration_ns, then drains in-flight transactions.
RunResult run_scenario(const SimConfig& config, const RunOptions& options = {});

struct TimingContractViolation {
  TxnId txn = 0;
  Nanos coordination_ns = 0;
};

// Committed transactions whose realized coordination latency reached tau_q_p.
std::vector<TimingContractViolation> assert_timing_contract(const RunResult& result, const TimingParams& timing);

}  // namespace qmod
