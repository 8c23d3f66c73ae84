#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "qmod/rng.h"
#include "qmod/topology.h"
#include "qmod/units.h"

namespace qmod {

using TupleId = std::uint64_t;
using TxnId = std::uint64_t;

class UnknownTuple : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

enum class TupleState { Available, Reserved, Consumed, Expired };

const char* to_string(TupleState s);

// Classical metadata for one pre-distributed entangled pair.
struct EntanglementTuple {
  TupleId id = 0;
  Link endpoints;
  double fidelity = 1.0;
  Nanos t_gen_ns = 0;
  Nanos deadline_ns = 0;  // absolute: t_gen + tau_q_p; valid on [t_gen, deadline)
  TupleState state = TupleState::Available;
  std::optional<TxnId> owner;     // set while Reserved, kept after Consumed
  std::uint32_t release_count = 0;  // times returned to Available by a rollback
  Nanos retired_ns = -1;            // consumption or expiry time
};

struct FidelityDist {
  double lo = 1.0;
  double hi = 1.0;  // lo == hi means fixed
  bool fixed() const { return lo == hi; }
};

struct LinkConfig {
  Link endpoints;
  Nanos attempt_period_ns = 1000;
  double eta_trans = 1.0;
  FidelityDist fidelity;

  void validate() const;
};

enum class SelectionPolicy { YoungestFirst, OldestFirst };

enum class ReserveOutcome { Ok, Conflict, Expired };

const char* to_string(ReserveOutcome r);

// One heralded generation attempt. Draws once for success and, on success,
// once more for fidelity (only when the distribution is a range).
std::optional<EntanglementTuple> attempt_generate(const LinkConfig& link, Nanos now_ns, Nanos tau_q_p,
                                                  RandomStream& rng);

struct LedgerCounts {
  std::uint64_t generated = 0;
  std::uint64_t available = 0;
  std::uint64_t reserved = 0;
  std::uint64_t consumed = 0;
  std::uint64_t expired = 0;
  std::uint64_t released = 0;  // rollback releases (history, not a state)
};

// Live (Available or Reserved) entry used for rollback comparisons.
struct LiveEntry {
  TupleId id;
  TupleState state;
  std::optional<TxnId> owner;
  bool operator==(const LiveEntry&) const = default;
};

// Inventory of entanglement tuples. Single writer: every mutation is driven by
// the simulation event loop.
class Ledger {
 public:
  explicit Ledger(SelectionPolicy policy = SelectionPolicy::YoungestFirst, double min_fidelity = 0.0)
      : policy_(policy), min_fidelity_(min_fidelity) {}

  // Stores a freshly generated tuple; its id is reassigned to the next ledger id.
  TupleId insert(EntanglementTuple t);

  // Best Available, unexpired tuple on the link under the selection policy.
  // Expired tuples encountered on the link are moved to Expired.
  std::optional<TupleId> query(Link endpoints, Nanos now_ns);

  ReserveOutcome reserve(TupleId id, TxnId txn, Nanos now_ns);
  void release(TupleId id, TxnId txn);
  void consume(TupleId id, TxnId txn, Nanos now_ns);
  // Expires a tuple held by txn whose deadline has passed but has not been swept yet.
  void expire_held(TupleId id, TxnId txn, Nanos now_ns);

  // Moves every Available/Reserved tuple with deadline <= now to Expired.
  std::vector<TupleId> expire_sweep(Nanos now_ns);

  const EntanglementTuple& tuple(TupleId id) const;
  const std::vector<EntanglementTuple>& tuples() const { return tuples_; }
  LedgerCounts counts() const;
  std::vector<LiveEntry> live_snapshot() const;

  SelectionPolicy policy() const { return policy_; }

 private:
  using DeadlineKey = std::pair<Nanos, TupleId>;

  EntanglementTuple& at(TupleId id);
  void expire(EntanglementTuple& t, Nanos now_ns);
  void drop_available(const EntanglementTuple& t);

  SelectionPolicy policy_;
  double min_fidelity_;
  std::vector<EntanglementTuple> tuples_;  // indexed by TupleId
  std::map<Link, std::set<DeadlineKey>> available_;
  std::map<TupleId, TxnId> reserved_;
  std::priority_queue<DeadlineKey, std::vector<DeadlineKey>, std::greater<>> expiry_heap_;
  std::uint64_t consumed_ = 0;
  std::uint64_t expired_ = 0;
  std::uint64_t released_ = 0;
};

}  // namespace qmod
