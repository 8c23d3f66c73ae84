#pragma once

#include <cmath>
#include <vector>

#include "qmod/errors.h"
#include "qmod/units.h"

namespace qmod {

inline constexpr double kLightSpeed = 2.998e8;  // m/s

// Latency and coherence constants. Defaults reproduce the monolithic
// superconducting case study: 100 us coherence, 2.5 us decode, 0.5 us
// feedforward, sqrt(2) Manhattan elongation, 115 ns per lattice unit.
struct TimingParams {
  Nanos tau_q = 100 * kNanosPerMicro;
  Nanos tau_q_p = 100;  // 0.001 * tau_q
  Nanos tau_decode = 2500;
  Nanos tau_ff = 500;
  Nanos tau_route = 115;
  double alpha = std::sqrt(2.0);
  double refractive_index_n = 1.5;
  double light_speed_c = kLightSpeed;
  double safety_margin = 0.5;

  void validate() const;
};

// tau_q_p as a fraction of tau_q, rounded half-up to whole ns.
Nanos deadline_from_fraction(Nanos tau_q, double fraction);

// Thrown when tau_q_p cannot cover decode + feedforward.
class BudgetViolated : public std::domain_error {
 public:
  explicit BudgetViolated(Nanos deficit_ns);
  Nanos deficit_ns() const { return deficit_ns_; }

 private:
  Nanos deficit_ns_;
};

// Thrown when the coordination wall would sit below a single qubit.
class InfeasibleWall : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Maximum control radius in meters: (c / 2n) * (tau_q_p - tau_decode - tau_ff).
double locality_bound(const TimingParams& t);

// tau_c(N) = tau_decode + tau_ff + alpha * sqrt(N) * tau_route, in ns.
double coordination_latency(const TimingParams& t, double n_qubits);

// N* solving coordination_latency(N*) = safety_margin * tau_q.
double coordination_wall(const TimingParams& t);

// Same, with a real-valued routing latency (sweeps use non-integer steps).
double coordination_wall_at(const TimingParams& t, double tau_route_ns);

struct WallRow {
  double tau_route_ns = 0.0;
  double wall = 0.0;
};

std::vector<WallRow> wall_sensitivity(const TimingParams& t, double route_min_ns, double route_max_ns,
                                      int steps);

}  // namespace qmod
