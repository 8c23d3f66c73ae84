#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qmod/units.h"

namespace qmod {

using ModuleId = std::uint32_t;

// Unordered module pair, stored with first < second.
struct Link {
  ModuleId a = 0;
  ModuleId b = 0;

  Link() = default;
  Link(ModuleId x, ModuleId y) : a(x < y ? x : y), b(x < y ? y : x) {}

  auto operator<=>(const Link&) const = default;
};

struct GridPos {
  std::int64_t x = 0;
  std::int64_t y = 0;
  auto operator<=>(const GridPos&) const = default;
};

struct ModuleSpec {
  ModuleId id = 0;
  GridPos pos;                        // grid mode only
  std::optional<Nanos> local_gate_ns;  // overrides the protocol-wide local-entangle time
};

struct EdgeSpec {
  ModuleId a = 0;
  ModuleId b = 0;
  Nanos latency_ns = 0;
};

// Classical control graph. Grid mode routes Manhattan paths at a fixed per-unit
// latency; graph mode uses shortest paths over explicit edge latencies.
class Topology {
 public:
  enum class Mode { Grid, Graph };

  static Topology grid(std::vector<ModuleSpec> modules, double per_unit_latency_ns);
  static Topology graph(std::vector<ModuleSpec> modules, std::vector<EdgeSpec> edges);

  Mode mode() const { return mode_; }
  const std::vector<ModuleSpec>& modules() const { return modules_; }
  const std::vector<EdgeSpec>& edges() const { return edges_; }
  double per_unit_latency_ns() const { return per_unit_ns_; }
  bool contains(ModuleId id) const { return index_.count(id) != 0; }
  const ModuleSpec& module(ModuleId id) const;

  // Symmetric; zero iff i == j. Throws ConfigError for unknown modules.
  Nanos classical_latency(ModuleId i, ModuleId j) const;
  // Routing hops on the chosen path (Manhattan distance in grid mode).
  std::int64_t hops(ModuleId i, ModuleId j) const;
  // Largest pairwise latency in the whole topology.
  Nanos diameter_latency() const;

 private:
  Topology() = default;
  std::size_t index_of(ModuleId id) const;

  Mode mode_ = Mode::Grid;
  std::vector<ModuleSpec> modules_;
  std::vector<EdgeSpec> edges_;
  std::map<ModuleId, std::size_t> index_;
  double per_unit_ns_ = 0.0;
  // Graph mode: all-pairs shortest path latency and hop count.
  std::vector<std::vector<Nanos>> dist_;
  std::vector<std::vector<std::int64_t>> hop_;
};

}  // namespace qmod
