#include "qmod/protocol.h"

#include <algorithm>
#include <string>

#include "qmod/errors.h"

namespace qmod {

const char* to_string(TxnState s) {
  switch (s) {
    case TxnState::Pending: return "pending";
    case TxnState::Reserved: return "reserved";
    case TxnState::Committing: return "committing";
    case TxnState::Committed: return "committed";
    case TxnState::AbortedTemporal: return "aborted_temporal";
    case TxnState::AbortedPhysical: return "aborted_physical";
  }
  return "?";
}

const char* stage_name(int stage) {
  switch (stage) {
    case 1: return "query";
    case 2: return "local_entangle";
    case 3: return "measurement";
    case 4: return "coordination";
    case 5: return "feedforward";
  }
  return "?";
}

const char* to_string(AbortReason r) {
  switch (r) {
    case AbortReason::None: return "none";
    case AbortReason::NoTuple: return "no_tuple";
    case AbortReason::DeadlineMiss: return "deadline_miss";
    case AbortReason::Conflict: return "conflict";
    case AbortReason::Expired: return "expired";
    case AbortReason::HeraldedFault: return "heralded_fault";
    case AbortReason::MidCommitExpiry: return "mid_commit_expiry";
  }
  return "?";
}

const char* to_string(FailureKind k) {
  switch (k) {
    case FailureKind::HeraldedTimeoutAbort: return "heralded_timeout_abort";
    case FailureKind::HeraldedPhysicalLoss: return "heralded_physical_loss";
    case FailureKind::UnheraldedDecoherence: return "unheralded_decoherence";
    case FailureKind::QubitDegradation: return "qubit_degradation";
  }
  return "?";
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::ErasureMarker: return "erasure_marker";
    case Classification::DepolarizingNoise: return "depolarizing_noise";
    case Classification::PauliFrameUpdate: return "pauli_frame_update";
  }
  return "?";
}

void Transaction::transition(TxnState to) {
  const bool legal = [&] {
    switch (state) {
      case TxnState::Pending: return to == TxnState::Reserved || to == TxnState::AbortedTemporal;
      case TxnState::Reserved: return to == TxnState::Committing || to == TxnState::AbortedTemporal;
      case TxnState::Committing: return to == TxnState::Committed || to == TxnState::AbortedPhysical;
      default: return false;
    }
  }();
  if (!legal) {
    throw ProtocolViolation("txn " + std::to_string(id) + ": illegal transition " + to_string(state) + " -> " +
                            to_string(to));
  }
  state = to;
}

bool Transaction::terminal() const {
  return state == TxnState::Committed || state == TxnState::AbortedTemporal || state == TxnState::AbortedPhysical;
}

Classification classify_failure(FailureKind kind) {
  switch (kind) {
    case FailureKind::HeraldedTimeoutAbort:
    case FailureKind::HeraldedPhysicalLoss:
      return Classification::ErasureMarker;
    case FailureKind::UnheraldedDecoherence:
      return Classification::DepolarizingNoise;
    case FailureKind::QubitDegradation:
      return Classification::PauliFrameUpdate;
  }
  return Classification::DepolarizingNoise;
}

void ProtocolSettings::validate() const {
  if (!(multiplier >= 1.0)) throw ConfigError("percentile multiplier must be >= 1");
  if (!(jitter >= 0.0 && jitter < 1.0)) throw ConfigError("jitter fraction must lie in [0, 1)");
  if (retry_spacing < 0) throw ConfigError("retry spacing must be non-negative");
  if (!(min_fidelity >= 0.0 && min_fidelity <= 1.0)) throw ConfigError("min_fidelity must lie in [0, 1]");
  if (stages.query < 0 || stages.local_entangle < 0 || stages.measurement < 0) {
    throw ConfigError("stage latencies must be non-negative");
  }
}

void FaultModel::validate() const {
  for (double q : p) {
    if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("stage fault probabilities must lie in [0, 1]");
  }
}

std::array<Nanos, kCommitStages> nominal_stage_latencies(const Transaction& txn, const Topology& topology,
                                                         const TimingParams& timing,
                                                         const ProtocolSettings& settings) {
  if (txn.participants.size() < 2) throw ConfigError("a transaction needs at least two participants");
  Nanos local = 0;
  Nanos classical = 0;
  std::int64_t hops = 0;
  for (std::size_t i = 0; i < txn.participants.size(); ++i) {
    const auto& m = topology.module(txn.participants[i]);
    local = std::max(local, m.local_gate_ns.value_or(settings.stages.local_entangle));
    for (std::size_t j = i + 1; j < txn.participants.size(); ++j) {
      const Nanos lat = topology.classical_latency(txn.participants[i], txn.participants[j]);
      if (lat > classical) {
        classical = lat;
        hops = topology.hops(txn.participants[i], txn.participants[j]);
      }
    }
  }
  const Nanos decode = settings.per_hop_decode ? timing.tau_decode * std::max<std::int64_t>(1, hops) : timing.tau_decode;
  return {local, settings.stages.measurement, classical + decode, timing.tau_ff};
}

LatencyEstimate estimate_exec_latency(const Transaction& txn, const Topology& topology, const TimingParams& timing,
                                      const ProtocolSettings& settings, double multiplier) {
  if (!(multiplier >= 1.0)) throw ConfigError("percentile multiplier must be >= 1");
  const auto stages = nominal_stage_latencies(txn, topology, timing, settings);
  Nanos nominal = 0;
  for (Nanos s : stages) nominal += s;
  return {round_half_up(multiplier * static_cast<double>(nominal)), nominal, multiplier};
}

namespace {

std::vector<FailureRecord> per_participant(const Transaction& txn, FailureKind kind, Nanos now_ns) {
  std::vector<FailureRecord> out;
  out.reserve(txn.participants.size());
  for (ModuleId m : txn.participants) {
    out.push_back({txn.id, m, kind, classify_failure(kind), now_ns, 0, false});
  }
  return out;
}

}  // namespace

ReserveResult reserve_phase(Transaction& txn, Ledger& ledger, Nanos now_ns, const LatencyEstimate& estimate,
                            bool precheck) {
  if (txn.state != TxnState::Pending) {
    throw ProtocolViolation("reserve_phase on txn " + std::to_string(txn.id) + " in state " + to_string(txn.state));
  }
  txn.reserve_ns = now_ns;
  txn.estimate = estimate;

  ReserveResult result;
  for (const Link& link : txn.required_links) {
    const auto candidate = ledger.query(link, now_ns);
    if (!candidate) {
      result.reason = AbortReason::NoTuple;
    } else if (precheck && precheck_fails(now_ns, estimate.tau_exec_star_ns, ledger.tuple(*candidate).deadline_ns)) {
      result.reason = AbortReason::DeadlineMiss;
    } else {
      switch (ledger.reserve(*candidate, txn.id, now_ns)) {
        case ReserveOutcome::Ok: txn.reserved_tuples.push_back(*candidate); continue;
        case ReserveOutcome::Conflict: result.reason = AbortReason::Conflict; break;
        case ReserveOutcome::Expired: result.reason = AbortReason::Expired; break;
      }
    }
    result.failed_link = link;
    break;
  }

  if (result.reason == AbortReason::None) {
    txn.transition(TxnState::Reserved);
    result.reserved = true;
    return result;
  }

  for (TupleId id : txn.reserved_tuples) ledger.release(id, txn.id);
  txn.reserved_tuples.clear();
  txn.transition(TxnState::AbortedTemporal);
  txn.abort_reason = result.reason;
  txn.finished_ns = now_ns;
  result.records = per_participant(txn, FailureKind::HeraldedTimeoutAbort, now_ns);
  return result;
}

std::vector<FailureRecord> degrade(const Transaction& txn, Nanos now_ns, DegradePolicy policy,
                                   Nanos last_progress_ns, bool stalled_window_as_erasure) {
  if (txn.state != TxnState::Committing && txn.state != TxnState::AbortedPhysical &&
      txn.state != TxnState::AbortedTemporal) {
    throw ProtocolViolation("degrade on txn " + std::to_string(txn.id) + " in state " + to_string(txn.state));
  }
  std::vector<FailureRecord> out;
  for (ModuleId m : txn.participants) {
    FailureRecord r{txn.id, m, FailureKind::QubitDegradation, Classification::PauliFrameUpdate, now_ns, 0, false};
    r.known_initialization = policy == DegradePolicy::Reset;
    out.push_back(r);
  }
  const Nanos window = now_ns - last_progress_ns;
  if (window > 0) {
    for (ModuleId m : txn.participants) {
      FailureRecord r{txn.id, m, FailureKind::UnheraldedDecoherence,
                      classify_failure(FailureKind::UnheraldedDecoherence), now_ns, window, false};
      if (stalled_window_as_erasure) r.classification = Classification::ErasureMarker;
      out.push_back(r);
    }
  }
  return out;
}

CommitDriver::CommitDriver(const ProtocolSettings& settings, FaultModel faults, RandomStream fault_rng,
                           RandomStream jitter_rng)
    : settings_(settings), faults_(faults), fault_rng_(std::move(fault_rng)), jitter_rng_(std::move(jitter_rng)) {
  faults_.validate();
}

Nanos CommitDriver::realize(Nanos nominal) {
  if (settings_.jitter == 0.0 || nominal == 0) return nominal;
  const double offset = jitter_rng_.uniform(-1.0, 1.0) * settings_.jitter * static_cast<double>(nominal);
  return std::max<Nanos>(0, nominal + round_half_up(offset));
}

void CommitDriver::schedule(Transaction& txn, int stage, StageScheduler& scheduler, Nanos now_ns) {
  const auto k = static_cast<std::size_t>(stage - kFirstCommitStage);
  txn.stage = stage;
  txn.stage_realized[k] = realize(txn.stage_nominal[k]);
  scheduler.schedule_stage(txn.id, stage, now_ns + txn.stage_realized[k]);
}

void CommitDriver::commit_phase(Transaction& txn, StageScheduler& scheduler, Nanos now_ns) {
  if (txn.state != TxnState::Reserved) {
    throw ProtocolViolation("commit_phase on txn " + std::to_string(txn.id) + " in state " + to_string(txn.state));
  }
  txn.transition(TxnState::Committing);
  txn.commit_start_ns = now_ns;
  txn.last_progress_ns = now_ns;
  schedule(txn, kFirstCommitStage, scheduler, now_ns);
}

void CommitDriver::consume_held(Transaction& txn, Ledger& ledger, Nanos now_ns) {
  for (TupleId id : txn.reserved_tuples) {
    const auto& t = ledger.tuple(id);
    if (t.state != TupleState::Reserved) continue;
    if (t.deadline_ns <= now_ns) {
      ledger.expire_held(id, txn.id, now_ns);
    } else {
      ledger.consume(id, txn.id, now_ns);
    }
  }
}

StepOutcome CommitDriver::on_stage_complete(Transaction& txn, Ledger& ledger, int stage, Nanos now_ns,
                                            StageScheduler& scheduler) {
  StepOutcome out;
  if (txn.state != TxnState::Committing || txn.stage != stage) return out;

  // A held tuple past its deadline means the stage overran coherence.
  for (TupleId id : txn.reserved_tuples) {
    const auto& t = ledger.tuple(id);
    if (t.state == TupleState::Expired || t.deadline_ns <= now_ns) return on_tuple_expired(txn, ledger, now_ns);
  }

  const auto k = static_cast<std::size_t>(stage - kFirstCommitStage);
  if (fault_rng_.bernoulli(faults_.at_stage(stage))) {
    consume_held(txn, ledger, now_ns);
    txn.transition(TxnState::AbortedPhysical);
    txn.abort_reason = AbortReason::HeraldedFault;
    txn.finished_ns = now_ns;
    out.result = StepResult::AbortedPhysical;
    out.records = per_participant(txn, FailureKind::HeraldedPhysicalLoss, now_ns);
    auto degraded = degrade(txn, now_ns, settings_.degradation, now_ns, settings_.stalled_window_as_erasure);
    out.records.insert(out.records.end(), degraded.begin(), degraded.end());
    return out;
  }

  txn.stage_done_ns[k] = now_ns;
  txn.last_progress_ns = now_ns;
  if (stage == static_cast<int>(Stage::Coordination)) txn.coordination_ns = txn.stage_realized[k];
  if (stage == kLastStage) {
    consume_held(txn, ledger, now_ns);
    txn.transition(TxnState::Committed);
    txn.finished_ns = now_ns;
    out.result = StepResult::Committed;
    return out;
  }
  schedule(txn, stage + 1, scheduler, now_ns);
  out.result = StepResult::Advanced;
  return out;
}

StepOutcome CommitDriver::on_tuple_expired(Transaction& txn, Ledger& ledger, Nanos now_ns) {
  StepOutcome out;
  if (txn.state == TxnState::Reserved) {
    for (TupleId id : txn.reserved_tuples) {
      if (ledger.tuple(id).state == TupleState::Reserved) ledger.release(id, txn.id);
    }
    txn.transition(TxnState::AbortedTemporal);
    txn.abort_reason = AbortReason::Expired;
    txn.finished_ns = now_ns;
    out.result = StepResult::AbortedTemporal;
    out.records = per_participant(txn, FailureKind::HeraldedTimeoutAbort, now_ns);
    return out;
  }
  if (txn.state != TxnState::Committing) return out;

  // Remaining pairs were mid-protocol and are physically spent.
  consume_held(txn, ledger, now_ns);
  txn.transition(TxnState::AbortedPhysical);
  txn.abort_reason = AbortReason::MidCommitExpiry;
  txn.finished_ns = now_ns;
  out.result = StepResult::AbortedPhysical;
  out.records = degrade(txn, now_ns, settings_.degradation, txn.last_progress_ns, settings_.stalled_window_as_erasure);
  return out;
}

}  // namespace qmod
