#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qmod {

// Prefactors and exponents of the homogeneous vs. modular space-time cost model.
// Costs are dimensionless and normalized per fixed algorithmic depth.
struct ScalingParams {
  double A = 1.0;          // homogeneous prefactor
  double B = 100.0;        // per-interface prefactor
  double epsilon = 0.5;    // excess geometric exponent, > 0
  double gamma = 1.0;      // modular routing exponent, >= 1
  double eta_trans = 0.1;  // transduction success probability, (0, 1]
  int D = 2;               // embedding dimension; informational only
  double kappa = 1e3;      // physical-to-logical overhead; annotation only

  // Throws ConfigError when any invariant is broken.
  void validate() const;
};

double cost_homogeneous(const ScalingParams& p, double n_qubits);
double cost_modular(const ScalingParams& p, double n_qubits);

// 1 + epsilon > gamma, strictly.
bool crossover_condition(const ScalingParams& p);

// N_c = ((B/A)/eta)^(1/((1+eps)-gamma)); absent when the condition fails.
std::optional<double> crossover_scale(const ScalingParams& p);

struct CrossoverRow {
  double eta = 0.0;
  std::optional<double> n_c;
};

std::vector<CrossoverRow> sweep_crossover(const ScalingParams& p, std::span<const double> eta_values);

// Logical-qubit equivalent N / kappa, for annotating outputs.
inline double logical_equivalent(const ScalingParams& p, double n_qubits) { return n_qubits / p.kappa; }

struct PlatformProfile {
  std::string name;
  double tau_q_min = 0.0;  // seconds
  double tau_q_max = 0.0;
  std::optional<double> tau_gate_min;  // absent for memory-only platforms
  std::optional<double> tau_gate_max;
  std::string printed_n_ops;  // catalog annotation, not reconciled with the computed ratio

  void validate() const;
};

struct OpsRange {
  double n_ops_min = 0.0;
  double n_ops_max = 0.0;
};

// tau_q / tau_gate at the pessimistic and optimistic corners. Absent means the
// profile has no gate time (memory-only platform).
std::optional<OpsRange> ops_per_coherence(const PlatformProfile& profile);

// Built-in read-only catalog of representative platforms.
const std::vector<PlatformProfile>& platform_catalog();

}  // namespace qmod
