#include "qmod/scaling_model.h"

#include <cmath>
#include <string>

#include "qmod/errors.h"

namespace qmod {

namespace {

void check_probability(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw ConfigError("eta_trans must lie in (0, 1], got " + std::to_string(eta));
  }
}

void check_size(double n_qubits) {
  if (!(n_qubits >= 1.0) || !std::isfinite(n_qubits)) {
    throw ConfigError("n_qubits must be a finite value >= 1, got " + std::to_string(n_qubits));
  }
}

}  // namespace

void ScalingParams::validate() const {
  if (!(A > 0.0) || !(B > 0.0)) throw ConfigError("cost prefactors A and B must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(gamma >= 1.0)) throw ConfigError("gamma must be >= 1");
  check_probability(eta_trans);
  if (D < 1) throw ConfigError("embedding dimension D must be a positive integer");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
}

double cost_homogeneous(const ScalingParams& p, double n_qubits) {
  check_size(n_qubits);
  return p.A * std::pow(n_qubits, 1.0 + p.epsilon);
}

double cost_modular(const ScalingParams& p, double n_qubits) {
  check_size(n_qubits);
  return (p.B / p.eta_trans) * std::pow(n_qubits, p.gamma);
}

bool crossover_condition(const ScalingParams& p) { return 1.0 + p.epsilon > p.gamma; }

std::optional<double> crossover_scale(const ScalingParams& p) {
  if (!crossover_condition(p)) return std::nullopt;
  const double gap = (1.0 + p.epsilon) - p.gamma;
  return std::pow((p.B / p.A) / p.eta_trans, 1.0 / gap);
}

std::vector<CrossoverRow> sweep_crossover(const ScalingParams& p, std::span<const double> eta_values) {
  std::vector<CrossoverRow> rows;
  rows.reserve(eta_values.size());
  for (double eta : eta_values) {
    check_probability(eta);
    ScalingParams at = p;
    at.eta_trans = eta;
    rows.push_back({eta, crossover_scale(at)});
  }
  return rows;
}

void PlatformProfile::validate() const {
  if (!(tau_q_min > 0.0) || tau_q_min > tau_q_max) {
    throw ConfigError("profile '" + name + "': need 0 < tau_q_min <= tau_q_max");
  }
  if (tau_gate_min.has_value() != tau_gate_max.has_value()) {
    throw ConfigError("profile '" + name + "': gate time range must be given as a pair");
  }
  if (tau_gate_min && (!(*tau_gate_min > 0.0) || *tau_gate_min > *tau_gate_max)) {
    throw ConfigError("profile '" + name + "': need 0 < tau_gate_min <= tau_gate_max");
  }
}

std::optional<OpsRange> ops_per_coherence(const PlatformProfile& profile) {
  profile.validate();
  if (!profile.tau_gate_min) return std::nullopt;
  return OpsRange{profile.tau_q_min / *profile.tau_gate_max, profile.tau_q_max / *profile.tau_gate_min};
}

const std::vector<PlatformProfile>& platform_catalog() {
  static const std::vector<PlatformProfile> catalog = {
      {"Superconducting", 50e-6, 500e-6, 20e-9, 100e-9, "10^3-10^5"},
      {"Neutral Atom (Rydberg)", 50e-6, 200e-6, 0.2e-6, 2e-6, "10^2-10^3"},
      {"Neutral Atom (Hyperfine)", 1.0, 10.0, std::nullopt, std::nullopt, "Storage"},
      {"Trapped Ion", 1.0, 100.0, 1e-6, 100e-6, "10^4-10^7"},
  };
  return catalog;
}

}  // namespace qmod
