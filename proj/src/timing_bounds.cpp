#include "qmod/timing_bounds.h"

#include <string>

namespace qmod {

void TimingParams::validate() const {
  if (tau_q <= 0) throw ConfigError("tau_q must be positive");
  if (tau_q_p < 0 || tau_decode < 0 || tau_ff < 0 || tau_route < 0) {
    throw ConfigError("latencies must be non-negative");
  }
  if (tau_q_p > tau_q) throw ConfigError("tau_q_p must not exceed tau_q");
  if (!(alpha >= 1.0)) throw ConfigError("alpha must be >= 1");
  if (!(refractive_index_n >= 1.0)) throw ConfigError("refractive index must be >= 1");
  if (!(light_speed_c > 0.0)) throw ConfigError("signal speed must be positive");
  if (!(safety_margin > 0.0 && safety_margin <= 1.0)) throw ConfigError("safety_margin must lie in (0, 1]");
}

Nanos deadline_from_fraction(Nanos tau_q, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("tau_q_p fraction must lie in (0, 1]");
  return round_half_up(static_cast<double>(tau_q) * fraction);
}

BudgetViolated::BudgetViolated(Nanos deficit_ns)
    : std::domain_error("no positive control radius: decode + feedforward exceed tau_q_p by " +
                        std::to_string(deficit_ns) + " ns"),
      deficit_ns_(deficit_ns) {}

double locality_bound(const TimingParams& t) {
  const Nanos residual = t.tau_q_p - t.tau_decode - t.tau_ff;
  if (residual < 0) throw BudgetViolated(-residual);
  return (t.light_speed_c / (2.0 * t.refractive_index_n)) * (static_cast<double>(residual) * 1e-9);
}

double coordination_latency(const TimingParams& t, double n_qubits) {
  if (!(n_qubits >= 1.0)) throw ConfigError("n_qubits must be >= 1");
  return static_cast<double>(t.tau_decode + t.tau_ff) +
         t.alpha * std::sqrt(n_qubits) * static_cast<double>(t.tau_route);
}

double coordination_wall_at(const TimingParams& t, double tau_route_ns) {
  if (!(tau_route_ns > 0.0) || !(t.alpha > 0.0)) throw ConfigError("tau_route and alpha must be positive");
  const double budget = t.safety_margin * static_cast<double>(t.tau_q) - static_cast<double>(t.tau_decode + t.tau_ff);
  const double root = budget / (t.alpha * tau_route_ns);
  if (!(budget > 0.0) || root < 1.0) {
    throw InfeasibleWall("coordination wall at N < 1: architecture infeasible at any scale");
  }
  return root * root;
}

double coordination_wall(const TimingParams& t) {
  return coordination_wall_at(t, static_cast<double>(t.tau_route));
}

std::vector<WallRow> wall_sensitivity(const TimingParams& t, double route_min_ns, double route_max_ns,
                                      int steps) {
  if (!(route_min_ns > 0.0) || route_min_ns > route_max_ns) {
    throw ConfigError("route range must satisfy 0 < min <= max");
  }
  if (steps < 2) throw ConfigError("sensitivity needs at least 2 steps");
  std::vector<WallRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  const double span = route_max_ns - route_min_ns;
  for (int k = 0; k < steps; ++k) {
    // Pin the last point to the endpoint so it is not perturbed by rounding.
    const double route = k == steps - 1 ? route_max_ns : route_min_ns + span * k / (steps - 1);
    rows.push_back({route, coordination_wall_at(t, route)});
  }
  return rows;
}

}  // namespace qmod
