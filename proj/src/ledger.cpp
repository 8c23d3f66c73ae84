#include "qmod/ledger.h"

#include <algorithm>
#include <iterator>
#include <string>

#include "qmod/errors.h"

namespace qmod {

const char* to_string(TupleState s) {
  switch (s) {
    case TupleState::Available: return "available";
    case TupleState::Reserved: return "reserved";
    case TupleState::Consumed: return "consumed";
    case TupleState::Expired: return "expired";
  }
  return "?";
}

const char* to_string(ReserveOutcome r) {
  switch (r) {
    case ReserveOutcome::Ok: return "ok";
    case ReserveOutcome::Conflict: return "conflict";
    case ReserveOutcome::Expired: return "expired";
  }
  return "?";
}

void LinkConfig::validate() const {
  if (endpoints.a == endpoints.b) throw ConfigError("link endpoints must differ");
  if (attempt_period_ns <= 0) throw ConfigError("link attempt period must be positive");
  if (!(eta_trans > 0.0 && eta_trans <= 1.0)) throw ConfigError("link eta must lie in (0, 1]");
  if (!(fidelity.lo > 0.0 && fidelity.lo <= fidelity.hi && fidelity.hi <= 1.0)) {
    throw ConfigError("link fidelity must satisfy 0 < lo <= hi <= 1");
  }
}

std::optional<EntanglementTuple> attempt_generate(const LinkConfig& link, Nanos now_ns, Nanos tau_q_p,
                                                  RandomStream& rng) {
  if (!rng.bernoulli(link.eta_trans)) return std::nullopt;
  EntanglementTuple t;
  t.endpoints = link.endpoints;
  t.fidelity = link.fidelity.fixed() ? link.fidelity.lo : rng.uniform(link.fidelity.lo, link.fidelity.hi);
  t.t_gen_ns = now_ns;
  t.deadline_ns = now_ns + tau_q_p;
  return t;
}

EntanglementTuple& Ledger::at(TupleId id) {
  if (id >= tuples_.size()) throw UnknownTuple("unknown tuple id " + std::to_string(id));
  return tuples_[id];
}

const EntanglementTuple& Ledger::tuple(TupleId id) const {
  if (id >= tuples_.size()) throw UnknownTuple("unknown tuple id " + std::to_string(id));
  return tuples_[id];
}

TupleId Ledger::insert(EntanglementTuple t) {
  if (t.endpoints.a == t.endpoints.b) throw ProtocolViolation("tuple endpoints must differ");
  if (t.deadline_ns <= t.t_gen_ns) throw ProtocolViolation("tuple deadline must follow generation");
  t.id = tuples_.size();
  t.state = TupleState::Available;
  t.owner.reset();
  available_[t.endpoints].emplace(t.deadline_ns, t.id);
  expiry_heap_.emplace(t.deadline_ns, t.id);
  tuples_.push_back(t);
  return t.id;
}

void Ledger::drop_available(const EntanglementTuple& t) {
  auto it = available_.find(t.endpoints);
  if (it != available_.end()) it->second.erase({t.deadline_ns, t.id});
}

void Ledger::expire(EntanglementTuple& t, Nanos now_ns) {
  if (t.state == TupleState::Available) drop_available(t);
  if (t.state == TupleState::Reserved) reserved_.erase(t.id);
  t.state = TupleState::Expired;
  t.retired_ns = now_ns;
  ++expired_;
}

std::optional<TupleId> Ledger::query(Link endpoints, Nanos now_ns) {
  auto it = available_.find(endpoints);
  if (it == available_.end()) return std::nullopt;
  auto& pool = it->second;
  while (!pool.empty() && pool.begin()->first <= now_ns) {
    expire(tuples_[pool.begin()->second], now_ns);
  }
  if (pool.empty()) return std::nullopt;

  if (policy_ == SelectionPolicy::OldestFirst) {
    for (const auto& [deadline, id] : pool) {
      if (tuples_[id].fidelity >= min_fidelity_) return id;
    }
    return std::nullopt;
  }
  // Youngest first: walk deadlines from the top; within one deadline the
  // smallest id comes first.
  auto group_end = pool.end();
  while (group_end != pool.begin()) {
    const Nanos deadline = std::prev(group_end)->first;
    auto group_begin = pool.lower_bound({deadline, 0});
    for (auto g = group_begin; g != group_end; ++g) {
      if (tuples_[g->second].fidelity >= min_fidelity_) return g->second;
    }
    group_end = group_begin;
  }
  return std::nullopt;
}

ReserveOutcome Ledger::reserve(TupleId id, TxnId txn, Nanos now_ns) {
  auto& t = at(id);
  switch (t.state) {
    case TupleState::Available:
      if (now_ns >= t.deadline_ns) {
        expire(t, now_ns);
        return ReserveOutcome::Expired;
      }
      drop_available(t);
      t.state = TupleState::Reserved;
      t.owner = txn;
      reserved_.emplace(id, txn);
      return ReserveOutcome::Ok;
    case TupleState::Reserved:
    case TupleState::Consumed:
      return ReserveOutcome::Conflict;
    case TupleState::Expired:
      return ReserveOutcome::Expired;
  }
  return ReserveOutcome::Conflict;
}

void Ledger::release(TupleId id, TxnId txn) {
  auto& t = at(id);
  if (t.state != TupleState::Reserved || t.owner != txn) {
    throw ProtocolViolation("txn " + std::to_string(txn) + " released tuple " + std::to_string(id) +
                            " it does not hold");
  }
  reserved_.erase(id);
  t.state = TupleState::Available;
  t.owner.reset();
  ++t.release_count;
  ++released_;
  available_[t.endpoints].emplace(t.deadline_ns, t.id);
}

void Ledger::consume(TupleId id, TxnId txn, Nanos now_ns) {
  auto& t = at(id);
  if (t.state != TupleState::Reserved || t.owner != txn) {
    throw ProtocolViolation("txn " + std::to_string(txn) + " consumed tuple " + std::to_string(id) +
                            " it does not hold (state " + to_string(t.state) + ")");
  }
  if (now_ns >= t.deadline_ns) {
    throw ProtocolViolation("tuple " + std::to_string(id) + " consumed at or after its deadline");
  }
  reserved_.erase(id);
  t.state = TupleState::Consumed;
  t.retired_ns = now_ns;
  ++consumed_;
}

void Ledger::expire_held(TupleId id, TxnId txn, Nanos now_ns) {
  auto& t = at(id);
  if (t.state != TupleState::Reserved || t.owner != txn || now_ns < t.deadline_ns) {
    throw ProtocolViolation("expire_held on tuple " + std::to_string(id) + " not held past its deadline");
  }
  expire(t, now_ns);
}

std::vector<TupleId> Ledger::expire_sweep(Nanos now_ns) {
  std::vector<TupleId> out;
  while (!expiry_heap_.empty() && expiry_heap_.top().first <= now_ns) {
    const TupleId id = expiry_heap_.top().second;
    expiry_heap_.pop();
    auto& t = tuples_[id];
    if (t.state == TupleState::Available || t.state == TupleState::Reserved) {
      expire(t, now_ns);
      out.push_back(id);
    }
  }
  return out;
}

LedgerCounts Ledger::counts() const {
  LedgerCounts c;
  c.generated = tuples_.size();
  c.reserved = reserved_.size();
  for (const auto& [link, pool] : available_) c.available += pool.size();
  c.consumed = consumed_;
  c.expired = expired_;
  c.released = released_;
  return c;
}

std::vector<LiveEntry> Ledger::live_snapshot() const {
  std::vector<LiveEntry> out;
  for (const auto& [link, pool] : available_) {
    for (const auto& key : pool) out.push_back({key.second, TupleState::Available, std::nullopt});
  }
  for (const auto& [id, txn] : reserved_) out.push_back({id, TupleState::Reserved, txn});
  std::sort(out.begin(), out.end(), [](const LiveEntry& x, const LiveEntry& y) { return x.id < y.id; });
  return out;
}

}  // namespace qmod
