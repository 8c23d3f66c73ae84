#include <doctest.h>

#include <cmath>
#include <map>
#include <queue>
#include <tuple>

#include "qmod/errors.h"
#include "qmod/protocol.h"

using namespace qmod;

namespace {

// Minimal time-ordered driver for CommitDriver outside the simulation kernel.
class InlineScheduler : public StageScheduler {
 public:
  void schedule_stage(TxnId txn, int stage, Nanos at_ns) override { queue_.push({at_ns, seq_++, txn, stage}); }
  bool empty() const { return queue_.empty(); }
  std::tuple<Nanos, TxnId, int> pop() {
    auto e = queue_.top();
    queue_.pop();
    return {e.at, e.txn, e.stage};
  }

 private:
  struct Entry {
    Nanos at;
    std::uint64_t seq;
    TxnId txn;
    int stage;
    bool operator>(const Entry& o) const { return std::tie(at, seq) > std::tie(o.at, o.seq); }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
};

EntanglementTuple make_tuple(Link link, Nanos t_gen, Nanos deadline) {
  EntanglementTuple t;
  t.endpoints = link;
  t.t_gen_ns = t_gen;
  t.deadline_ns = deadline;
  return t;
}

Transaction pair_txn(TxnId id, ModuleId a = 0, ModuleId b = 1) {
  Transaction txn;
  txn.id = id;
  txn.participants = {a, b};
  txn.required_links = {{a, b}};
  return txn;
}

LatencyEstimate estimate_of(Nanos tau_star) { return {tau_star, tau_star, 1.0}; }

ProtocolSettings no_jitter() {
  ProtocolSettings s;
  s.jitter = 0.0;
  return s;
}

// Runs one reserved transaction to a terminal state; returns every emitted record.
std::vector<FailureRecord> run_commit(CommitDriver& driver, Transaction& txn, Ledger& ledger, Nanos start) {
  InlineScheduler sched;
  std::vector<FailureRecord> records;
  driver.commit_phase(txn, sched, start);
  while (!sched.empty()) {
    auto [at, id, stage] = sched.pop();
    auto out = driver.on_stage_complete(txn, ledger, stage, at, sched);
    records.insert(records.end(), out.records.begin(), out.records.end());
  }
  return records;
}

}  // namespace

TEST_CASE("classify_failure is the fixed total map") {
  CHECK(classify_failure(FailureKind::HeraldedTimeoutAbort) == Classification::ErasureMarker);
  CHECK(classify_failure(FailureKind::UnheraldedDecoherence) == Classification::DepolarizingNoise);
  CHECK(classify_failure(FailureKind::HeraldedPhysicalLoss) == Classification::ErasureMarker);
  CHECK(classify_failure(FailureKind::QubitDegradation) == Classification::PauliFrameUpdate);
}

TEST_CASE("transaction transition table") {
  Transaction t;
  CHECK_THROWS_AS(t.transition(TxnState::Committed), ProtocolViolation);
  CHECK_THROWS_AS(t.transition(TxnState::Committing), ProtocolViolation);
  t.transition(TxnState::Reserved);
  CHECK_THROWS_AS(t.transition(TxnState::Committed), ProtocolViolation);
  t.transition(TxnState::Committing);
  CHECK_THROWS_AS(t.transition(TxnState::AbortedTemporal), ProtocolViolation);
  t.transition(TxnState::Committed);
  CHECK(t.terminal());
  CHECK_THROWS_AS(t.transition(TxnState::AbortedPhysical), ProtocolViolation);
}

TEST_CASE("estimate_exec_latency examples") {
  TimingParams timing;
  ProtocolSettings s;
  s.stages.local_entangle = 0;
  s.stages.measurement = 0;
  timing.tau_ff = 0;
  timing.tau_decode = 6000;
  auto graph = Topology::graph({{0, {}, {}}, {1, {}, {}}}, {{0, 1, 4000}});
  auto txn = pair_txn(1);
  auto est = estimate_exec_latency(txn, graph, timing, s, 1.0);
  CHECK(est.tau_exec_star_ns == 10'000);

  // Scaling: nominal stages summing to 20 us under multiplier 1.5.
  timing.tau_decode = 16'000;
  est = estimate_exec_latency(txn, graph, timing, s, 1.5);
  CHECK(est.nominal_ns == 20'000);
  CHECK(est.tau_exec_star_ns == 30'000);

  // Grid: Manhattan distance 3 at 115 ns * sqrt(2) per unit.
  TimingParams defaults;
  ProtocolSettings grid_settings;
  grid_settings.stages.local_entangle = 500;
  grid_settings.stages.measurement = 500;
  auto grid = Topology::grid({{0, {0, 0}, {}}, {1, {1, 2}, {}}}, 115.0 * std::sqrt(2.0));
  est = estimate_exec_latency(txn, grid, defaults, grid_settings, 1.0);
  const Nanos oracle = 1000 + std::llround(3 * 115.0 * std::sqrt(2.0)) + 2500 + 500;
  CHECK(est.tau_exec_star_ns == oracle);
  CHECK(est.tau_exec_star_ns == doctest::Approx(4488).epsilon(1e-3));

  CHECK_THROWS_AS(estimate_exec_latency(txn, grid, defaults, grid_settings, 0.9), ConfigError);
}

TEST_CASE("per-hop decode multiplies decode by the routing hops") {
  TimingParams timing;
  ProtocolSettings s;
  s.per_hop_decode = true;
  auto graph = Topology::graph({{0, {}, {}}, {1, {}, {}}, {2, {}, {}}}, {{0, 1, 10}, {1, 2, 10}});
  auto lat = nominal_stage_latencies(pair_txn(1, 0, 2), graph, timing, s);
  CHECK(lat[2] == 20 + 2 * timing.tau_decode);
}

TEST_CASE("module local gate overrides the default local-entangle time") {
  TimingParams timing;
  ProtocolSettings s;
  auto grid = Topology::grid({{0, {0, 0}, Nanos{900}}, {1, {1, 0}, {}}}, 100.0);
  auto lat = nominal_stage_latencies(pair_txn(1), grid, timing, s);
  CHECK(lat[0] == 900);
  CHECK(lat[1] == s.stages.measurement);
  CHECK(lat[3] == timing.tau_ff);
}

TEST_CASE("reserve_phase pre-check examples") {
  Ledger ledger;
  const auto id = ledger.insert(make_tuple({0, 1}, 0, 50'000));
  auto txn = pair_txn(1);
  auto r = reserve_phase(txn, ledger, 10'000, estimate_of(45'000));
  CHECK_FALSE(r.reserved);
  CHECK(r.reason == AbortReason::DeadlineMiss);
  CHECK(txn.state == TxnState::AbortedTemporal);
  REQUIRE(r.records.size() == 2);
  for (const auto& rec : r.records) {
    CHECK(rec.kind == FailureKind::HeraldedTimeoutAbort);
    CHECK(rec.classification == Classification::ErasureMarker);
  }
  CHECK(ledger.tuple(id).state == TupleState::Available);

  auto ok = pair_txn(2);
  r = reserve_phase(ok, ledger, 10'000, estimate_of(30'000));
  CHECK(r.reserved);
  CHECK(ok.state == TxnState::Reserved);
  CHECK(ledger.tuple(id).owner == TxnId{2});
}

TEST_CASE("reserve_phase pre-check boundary under half-open validity") {
  Ledger ledger;
  ledger.insert(make_tuple({0, 1}, 0, 1000));
  auto edge = pair_txn(1);
  CHECK_FALSE(reserve_phase(edge, ledger, 400, estimate_of(600)).reserved);
  auto inside = pair_txn(2);
  CHECK(reserve_phase(inside, ledger, 400, estimate_of(599)).reserved);
}

TEST_CASE("reserve_phase rolls back partial reservations") {
  Ledger ledger;
  const auto a = ledger.insert(make_tuple({0, 1}, 0, 100'000));
  Transaction txn;
  txn.id = 5;
  txn.participants = {0, 1, 2};
  txn.required_links = {{0, 1}, {1, 2}};
  const auto before = ledger.live_snapshot();
  auto r = reserve_phase(txn, ledger, 0, estimate_of(10));
  CHECK_FALSE(r.reserved);
  CHECK(r.reason == AbortReason::NoTuple);
  CHECK(r.failed_link == Link{1, 2});
  CHECK(ledger.live_snapshot() == before);
  CHECK(ledger.tuple(a).state == TupleState::Available);
  CHECK(ledger.tuple(a).release_count == 1);
  CHECK(txn.reserved_tuples.empty());
  CHECK(r.records.size() == 3);
}

TEST_CASE("reserve_phase without the pre-check reserves past the projected deadline") {
  Ledger ledger;
  ledger.insert(make_tuple({0, 1}, 0, 100));
  auto txn = pair_txn(1);
  CHECK(reserve_phase(txn, ledger, 0, estimate_of(1000), false).reserved);
}

TEST_CASE("commit_phase with zero fault probabilities always commits") {
  Ledger ledger;
  ProtocolSettings s;
  CommitDriver driver(s, FaultModel{}, RandomStream(1, "fault"), RandomStream(1, "jitter"));
  for (TxnId i = 0; i < 200; ++i) {
    const auto id = ledger.insert(make_tuple({0, 1}, 0, 1'000'000'000));
    auto txn = pair_txn(i);
    txn.stage_nominal = {100, 500, 3000, 500};
    REQUIRE(reserve_phase(txn, ledger, 0, estimate_of(10'000)).reserved);
    auto records = run_commit(driver, txn, ledger, 0);
    CHECK(txn.state == TxnState::Committed);
    CHECK(records.empty());
    CHECK(ledger.tuple(id).state == TupleState::Consumed);
    CHECK(txn.coordination_ns >= 0);
  }
}

TEST_CASE("commit_phase with a certain measurement fault aborts physically with erasure markers") {
  Ledger ledger;
  const auto id = ledger.insert(make_tuple({0, 1}, 0, 1'000'000));
  ProtocolSettings s = no_jitter();
  FaultModel faults;
  faults.p[static_cast<int>(Stage::Measurement) - kFirstCommitStage] = 1.0;
  CommitDriver driver(s, faults, RandomStream(1, "fault"), RandomStream(1, "jitter"));
  auto txn = pair_txn(1);
  txn.stage_nominal = {100, 500, 3000, 500};
  REQUIRE(reserve_phase(txn, ledger, 0, estimate_of(4100)).reserved);
  auto records = run_commit(driver, txn, ledger, 0);
  CHECK(txn.state == TxnState::AbortedPhysical);
  CHECK(txn.abort_reason == AbortReason::HeraldedFault);
  CHECK(txn.finished_ns == 600);
  CHECK(ledger.tuple(id).state == TupleState::Consumed);
  int erasures = 0;
  int unheralded = 0;
  for (const auto& r : records) {
    erasures += r.kind == FailureKind::HeraldedPhysicalLoss && r.classification == Classification::ErasureMarker;
    unheralded += r.kind == FailureKind::UnheraldedDecoherence;
  }
  CHECK(erasures == 2);
  CHECK(unheralded == 0);
}

TEST_CASE("commit fraction under independent stage faults matches the Bernoulli oracle") {
  Ledger ledger;
  ProtocolSettings s = no_jitter();
  FaultModel faults;
  faults.p = {0.1, 0.1, 0.1, 0.1};
  CommitDriver driver(s, faults, RandomStream(42, "fault"), RandomStream(42, "jitter"));
  const int n = 10'000;
  int committed = 0;
  for (int i = 0; i < n; ++i) {
    ledger.insert(make_tuple({0, 1}, 0, 1'000'000'000));
    auto txn = pair_txn(static_cast<TxnId>(i));
    txn.stage_nominal = {100, 500, 3000, 500};
    REQUIRE(reserve_phase(txn, ledger, 0, estimate_of(4100)).reserved);
    run_commit(driver, txn, ledger, 0);
    committed += txn.state == TxnState::Committed;
  }
  const double p = std::pow(0.9, 4);
  const double sigma = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(committed / static_cast<double>(n) - p) <= 3 * sigma);
}

TEST_CASE("jitter stays within the configured band") {
  Ledger ledger;
  ProtocolSettings s;
  s.jitter = 0.3;
  CommitDriver driver(s, FaultModel{}, RandomStream(3, "fault"), RandomStream(3, "jitter"));
  for (TxnId i = 0; i < 100; ++i) {
    ledger.insert(make_tuple({0, 1}, 0, 1'000'000'000));
    auto txn = pair_txn(i);
    txn.stage_nominal = {1000, 1000, 1000, 1000};
    REQUIRE(reserve_phase(txn, ledger, 0, estimate_of(4000)).reserved);
    run_commit(driver, txn, ledger, 0);
    for (Nanos r : txn.stage_realized) {
      CHECK(r >= 700);
      CHECK(r <= 1300);
    }
  }
}

TEST_CASE("mid-commit expiry degrades with a stalled window") {
  Ledger ledger;
  const auto id = ledger.insert(make_tuple({0, 1}, 0, 2000));
  ProtocolSettings s = no_jitter();
  CommitDriver driver(s, FaultModel{}, RandomStream(1, "fault"), RandomStream(1, "jitter"));
  auto txn = pair_txn(1);
  txn.stage_nominal = {100, 500, 3000, 500};
  REQUIRE(reserve_phase(txn, ledger, 0, estimate_of(10), false).reserved);
  auto records = run_commit(driver, txn, ledger, 0);
  CHECK(txn.state == TxnState::AbortedPhysical);
  CHECK(txn.abort_reason == AbortReason::MidCommitExpiry);
  CHECK(ledger.tuple(id).state == TupleState::Expired);
  int pauli = 0;
  int stalled = 0;
  for (const auto& r : records) {
    pauli += r.classification == Classification::PauliFrameUpdate;
    if (r.kind == FailureKind::UnheraldedDecoherence) {
      ++stalled;
      CHECK(r.classification == Classification::DepolarizingNoise);
      CHECK(r.window_ns == 3600 - 600);
    }
  }
  CHECK(pauli == 2);
  CHECK(stalled == 2);
}

TEST_CASE("on_tuple_expired releases a Reserved transaction") {
  Ledger ledger;
  const auto keep = ledger.insert(make_tuple({0, 1}, 0, 10'000));
  const auto gone = ledger.insert(make_tuple({1, 2}, 0, 50));
  Transaction txn;
  txn.id = 1;
  txn.participants = {0, 1, 2};
  txn.required_links = {{0, 1}, {1, 2}};
  REQUIRE(reserve_phase(txn, ledger, 0, estimate_of(10)).reserved);
  ledger.expire_sweep(50);
  CommitDriver driver(no_jitter(), FaultModel{}, RandomStream(1, "fault"), RandomStream(1, "jitter"));
  auto out = driver.on_tuple_expired(txn, ledger, 50);
  CHECK(out.result == StepResult::AbortedTemporal);
  CHECK(txn.state == TxnState::AbortedTemporal);
  CHECK(ledger.tuple(keep).state == TupleState::Available);
  CHECK(ledger.tuple(gone).state == TupleState::Expired);
  CHECK(out.records.size() == 3);
}

TEST_CASE("degrade examples") {
  auto txn = pair_txn(1);
  txn.state = TxnState::AbortedPhysical;
  auto recs = degrade(txn, 1000, DegradePolicy::Reset, 1000);
  REQUIRE(recs.size() == 2);
  for (const auto& r : recs) {
    CHECK(r.classification == Classification::PauliFrameUpdate);
    CHECK(r.known_initialization);
  }

  recs = degrade(txn, 6000, DegradePolicy::Measure, 1000);
  REQUIRE(recs.size() == 4);
  int pauli = 0;
  int stalled = 0;
  for (const auto& r : recs) {
    pauli += r.classification == Classification::PauliFrameUpdate;
    stalled += r.kind == FailureKind::UnheraldedDecoherence && r.window_ns == 5000;
    CHECK_FALSE(r.known_initialization);
  }
  CHECK(pauli == 2);
  CHECK(stalled == 2);

  recs = degrade(txn, 6000, DegradePolicy::Reset, 1000, true);
  CHECK(recs[2].classification == Classification::ErasureMarker);

  txn.state = TxnState::Committed;
  CHECK_THROWS_AS(degrade(txn, 0, DegradePolicy::Reset, 0), ProtocolViolation);
}

TEST_CASE("stale stage events are ignored") {
  Ledger ledger;
  ledger.insert(make_tuple({0, 1}, 0, 1'000'000));
  CommitDriver driver(no_jitter(), FaultModel{}, RandomStream(1, "fault"), RandomStream(1, "jitter"));
  auto txn = pair_txn(1);
  txn.stage_nominal = {100, 100, 100, 100};
  REQUIRE(reserve_phase(txn, ledger, 0, estimate_of(400)).reserved);
  InlineScheduler sched;
  driver.commit_phase(txn, sched, 0);
  CHECK(driver.on_stage_complete(txn, ledger, 4, 100, sched).result == StepResult::Ignored);
  CHECK(txn.stage == 2);
}

TEST_CASE("property: raising the multiplier never adds mid-commit expiries") {
  // Tuples of random age; jittered stages; count expiries per multiplier on identical streams.
  auto expiries = [](double multiplier) {
    Ledger ledger;
    ProtocolSettings s;
    s.jitter = 0.5;
    CommitDriver driver(s, FaultModel{}, RandomStream(5, "fault"), RandomStream(5, "jitter"));
    RandomStream ages(5, "workload");
    int count = 0;
    for (TxnId i = 0; i < 2000; ++i) {
      const Nanos now = static_cast<Nanos>(i) * 100'000;
      const Nanos remaining = 1000 + static_cast<Nanos>(ages.below(8000));
      ledger.insert(make_tuple({0, 1}, now - 1, now + remaining));
      auto txn = pair_txn(i);
      txn.stage_nominal = {500, 500, 2000, 500};
      const Nanos star = std::llround(multiplier * 3500);
      if (!reserve_phase(txn, ledger, now, estimate_of(star)).reserved) continue;
      run_commit(driver, txn, ledger, now);
      count += txn.abort_reason == AbortReason::MidCommitExpiry;
    }
    return count;
  };
  int prev = expiries(1.0);
  CHECK(prev > 0);
  for (double m : {1.2, 1.5, 2.0}) {
    const int now = expiries(m);
    CHECK(now <= prev);
    prev = now;
  }
  CHECK(prev == 0);
}
