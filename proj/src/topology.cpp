#include "qmod/topology.h"

#include <cstdlib>
#include <limits>
#include <queue>
#include <tuple>
#include <set>
#include <string>

#include "qmod/errors.h"

namespace qmod {

namespace {

void index_modules(const std::vector<ModuleSpec>& modules, std::map<ModuleId, std::size_t>& index) {
  if (modules.empty()) throw ConfigError("topology has no modules");
  for (std::size_t k = 0; k < modules.size(); ++k) {
    if (!index.emplace(modules[k].id, k).second) {
      throw ConfigError("duplicate module id " + std::to_string(modules[k].id));
    }
    if (modules[k].local_gate_ns && *modules[k].local_gate_ns < 0) {
      throw ConfigError("module " + std::to_string(modules[k].id) + " has negative local gate time");
    }
  }
}

}  // namespace

Topology Topology::grid(std::vector<ModuleSpec> modules, double per_unit_latency_ns) {
  Topology t;
  t.mode_ = Mode::Grid;
  index_modules(modules, t.index_);
  if (!(per_unit_latency_ns >= 0.0)) throw ConfigError("per-unit latency must be non-negative");
  std::set<GridPos> seen;
  for (const auto& m : modules) {
    if (!seen.insert(m.pos).second) {
      throw ConfigError("module " + std::to_string(m.id) + " shares a grid position with another module");
    }
  }
  t.modules_ = std::move(modules);
  t.per_unit_ns_ = per_unit_latency_ns;
  return t;
}

Topology Topology::graph(std::vector<ModuleSpec> modules, std::vector<EdgeSpec> edges) {
  Topology t;
  t.mode_ = Mode::Graph;
  index_modules(modules, t.index_);
  t.modules_ = std::move(modules);
  const std::size_t n = t.modules_.size();

  std::vector<std::vector<std::pair<std::size_t, Nanos>>> adj(n);
  for (const auto& e : edges) {
    if (e.latency_ns < 0) throw ConfigError("edge latencies must be non-negative");
    if (e.a == e.b) throw ConfigError("self-loop edge on module " + std::to_string(e.a));
    const std::size_t u = t.index_of(e.a);
    const std::size_t v = t.index_of(e.b);
    adj[u].emplace_back(v, e.latency_ns);
    adj[v].emplace_back(u, e.latency_ns);
  }
  t.edges_ = std::move(edges);

  // Dijkstra from every source; ties in latency prefer fewer hops.
  constexpr Nanos kInf = std::numeric_limits<Nanos>::max();
  t.dist_.assign(n, std::vector<Nanos>(n, kInf));
  t.hop_.assign(n, std::vector<std::int64_t>(n, 0));
  using Entry = std::tuple<Nanos, std::int64_t, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    auto& dist = t.dist_[s];
    auto& hop = t.hop_[s];
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    dist[s] = 0;
    pq.emplace(0, 0, s);
    while (!pq.empty()) {
      auto [d, h, u] = pq.top();
      pq.pop();
      if (d != dist[u] || h != hop[u]) continue;
      for (auto [v, w] : adj[u]) {
        const Nanos nd = d + w;
        if (nd < dist[v] || (nd == dist[v] && h + 1 < hop[v])) {
          dist[v] = nd;
          hop[v] = h + 1;
          pq.emplace(nd, h + 1, v);
        }
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (dist[v] == kInf) throw ConfigError("classical control graph is not connected");
    }
  }
  return t;
}

std::size_t Topology::index_of(ModuleId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ConfigError("unknown module " + std::to_string(id));
  return it->second;
}

const ModuleSpec& Topology::module(ModuleId id) const { return modules_[index_of(id)]; }

std::int64_t Topology::hops(ModuleId i, ModuleId j) const {
  const std::size_t u = index_of(i);
  const std::size_t v = index_of(j);
  if (mode_ == Mode::Graph) return hop_[u][v];
  const auto& p = modules_[u].pos;
  const auto& q = modules_[v].pos;
  return std::llabs(p.x - q.x) + std::llabs(p.y - q.y);
}

Nanos Topology::classical_latency(ModuleId i, ModuleId j) const {
  const std::size_t u = index_of(i);
  const std::size_t v = index_of(j);
  if (u == v) return 0;
  if (mode_ == Mode::Graph) return dist_[u][v];
  return round_half_up(static_cast<double>(hops(i, j)) * per_unit_ns_);
}

Nanos Topology::diameter_latency() const {
  Nanos worst = 0;
  for (const auto& a : modules_) {
    for (const auto& b : modules_) worst = std::max(worst, classical_latency(a.id, b.id));
  }
  return worst;
}

}  // namespace qmod
