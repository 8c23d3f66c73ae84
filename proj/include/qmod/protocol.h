#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qmod/ledger.h"
#include "qmod/rng.h"
#include "qmod/timing_bounds.h"
#include "qmod/topology.h"
#include "qmod/units.h"

namespace qmod {

enum class TxnState { Pending, Reserved, Committing, Committed, AbortedTemporal, AbortedPhysical };

const char* to_string(TxnState s);

// The five LOCC stages. Query happens during Reserve; 2..5 run in Commit.
enum class Stage : int { Query = 1, LocalEntangle = 2, Measurement = 3, Coordination = 4, Feedforward = 5 };

inline constexpr int kFirstCommitStage = 2;
inline constexpr int kLastStage = 5;
inline constexpr int kCommitStages = 4;

const char* stage_name(int stage);

enum class AbortReason { None, NoTuple, DeadlineMiss, Conflict, Expired, HeraldedFault, MidCommitExpiry };

const char* to_string(AbortReason r);

struct LatencyEstimate {
  Nanos tau_exec_star_ns = 0;
  Nanos nominal_ns = 0;  // deterministic minimum path latency
  double percentile_multiplier = 1.0;
};

struct Transaction {
  TxnId id = 0;
  std::vector<ModuleId> participants;
  std::vector<Link> required_links;
  std::vector<TupleId> reserved_tuples;
  TxnState state = TxnState::Pending;
  int stage = 0;  // current commit stage while Committing
  Nanos created_ns = 0;
  Nanos finished_ns = -1;  // committed or aborted

  Nanos reserve_ns = -1;       // when the pre-check ran
  Nanos commit_start_ns = -1;
  Nanos last_progress_ns = -1;  // last clean stage completion
  Nanos coordination_ns = -1;   // realized coordination-stage latency
  LatencyEstimate estimate;
  std::array<Nanos, kCommitStages> stage_nominal{};   // stages 2..5
  std::array<Nanos, kCommitStages> stage_realized{};  // with jitter applied
  std::array<Nanos, kCommitStages> stage_done_ns{-1, -1, -1, -1};
  AbortReason abort_reason = AbortReason::None;
  std::uint32_t attempt = 0;
  std::optional<TxnId> retry_of;

  // Enforces the legal transition table; throws ProtocolViolation otherwise.
  void transition(TxnState to);
  bool terminal() const;
};

enum class FailureKind { HeraldedTimeoutAbort, HeraldedPhysicalLoss, UnheraldedDecoherence, QubitDegradation };
enum class Classification { ErasureMarker, DepolarizingNoise, PauliFrameUpdate };

const char* to_string(FailureKind k);
const char* to_string(Classification c);

struct FailureRecord {
  TxnId txn = 0;
  ModuleId module = 0;
  FailureKind kind = FailureKind::HeraldedTimeoutAbort;
  Classification classification = Classification::ErasureMarker;
  Nanos time_ns = 0;
  Nanos window_ns = 0;             // stalled window, unheralded records only
  bool known_initialization = false;  // degradation under the Reset policy
};

// Total map from failure kind to the decoder-facing classification.
Classification classify_failure(FailureKind kind);

enum class DegradePolicy { Measure, Reset };

struct StageLatencies {
  Nanos query = 100;
  Nanos local_entangle = 100;
  Nanos measurement = 500;
};

struct ProtocolSettings {
  double multiplier = 1.5;
  bool precheck = true;
  double jitter = 0.3;  // stage latency varies uniformly within +-jitter*nominal
  std::uint32_t retries = 0;
  Nanos retry_spacing = 1000;
  DegradePolicy degradation = DegradePolicy::Reset;
  SelectionPolicy selection = SelectionPolicy::YoungestFirst;
  double min_fidelity = 0.0;
  bool stalled_window_as_erasure = false;
  bool per_hop_decode = false;
  StageLatencies stages;

  void validate() const;
};

// Independent per-stage heralded-failure probabilities for stages 2..5.
struct FaultModel {
  std::array<double, kCommitStages> p{0.0, 0.0, 0.0, 0.0};

  double at_stage(int stage) const { return p[static_cast<std::size_t>(stage - kFirstCommitStage)]; }
  void validate() const;
};

// Nominal latencies of stages 2..5 for this transaction.
std::array<Nanos, kCommitStages> nominal_stage_latencies(const Transaction& txn, const Topology& topology,
                                                         const TimingParams& timing,
                                                         const ProtocolSettings& settings);

LatencyEstimate estimate_exec_latency(const Transaction& txn, const Topology& topology, const TimingParams& timing,
                                      const ProtocolSettings& settings, double multiplier);

// True when the projected completion would not land strictly before the deadline.
inline bool precheck_fails(Nanos now_ns, Nanos tau_exec_star_ns, Nanos deadline_ns) {
  return now_ns + tau_exec_star_ns >= deadline_ns;
}

struct ReserveResult {
  bool reserved = false;
  AbortReason reason = AbortReason::None;
  std::optional<Link> failed_link;
  std::vector<FailureRecord> records;
};

// Atomic multi-link reservation with temporal pre-validation. On any failure
// every tuple taken so far is released and the txn ends AbortedTemporal.
ReserveResult reserve_phase(Transaction& txn, Ledger& ledger, Nanos now_ns, const LatencyEstimate& estimate,
                            bool precheck = true);

// Semantic degradation of the participant qubits on an aborting transaction.
std::vector<FailureRecord> degrade(const Transaction& txn, Nanos now_ns, DegradePolicy policy,
                                   Nanos last_progress_ns, bool stalled_window_as_erasure = false);

// Whatever drives time: the simulation kernel in production, an inline loop in tests.
class StageScheduler {
 public:
  virtual ~StageScheduler() = default;
  virtual void schedule_stage(TxnId txn, int stage, Nanos at_ns) = 0;
};

enum class StepResult { Ignored, Advanced, Committed, AbortedTemporal, AbortedPhysical };

struct StepOutcome {
  StepResult result = StepResult::Ignored;
  std::vector<FailureRecord> records;
};

// Runs stages 2..5 of committed reservations. Owns the fault and jitter streams.
class CommitDriver {
 public:
  CommitDriver(const ProtocolSettings& settings, FaultModel faults, RandomStream fault_rng,
               RandomStream jitter_rng);

  // Reserved -> Committing; schedules the first commit stage.
  // Stage latencies come from txn.stage_nominal.
  void commit_phase(Transaction& txn, StageScheduler& scheduler, Nanos now_ns);

  // Handles a StageComplete event. Stale events (txn no longer at that stage) are ignored.
  StepOutcome on_stage_complete(Transaction& txn, Ledger& ledger, int stage, Nanos now_ns,
                                StageScheduler& scheduler);

  // A tuple held by this txn expired before the txn finished.
  StepOutcome on_tuple_expired(Transaction& txn, Ledger& ledger, Nanos now_ns);

 private:
  Nanos realize(Nanos nominal);

  const ProtocolSettings& settings_;
  FaultModel faults_;
  RandomStream fault_rng_;
  RandomStream jitter_rng_;

  void schedule(Transaction& txn, int stage, StageScheduler& scheduler, Nanos now_ns);
  void consume_held(Transaction& txn, Ledger& ledger, Nanos now_ns);
};

}  // namespace qmod
