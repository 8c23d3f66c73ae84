#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qmod/sim_kernel.h"

namespace qmod {

inline constexpr double kDepolarizingThreshold = 0.0094;
inline constexpr double kErasureThreshold = 0.031;       // decision boundary
inline constexpr double kErasureThresholdUpper = 0.0415;  // annotation band only

enum class ThresholdVerdict { WithinDepolarizingThreshold, WithinErasureRegimeOnly, AboveAllThresholds };

const char* to_string(ThresholdVerdict v);

struct ComputeWindow {
  Nanos tau_compute_ns = 0;
  bool infeasible = false;  // negative window, reported as-is
};

// tau_q - (tau_c + tau_p), exact integer arithmetic.
ComputeWindow compute_window(Nanos tau_q, Nanos tau_c, Nanos tau_p);

ThresholdVerdict effective_threshold_check(double residual_depolarizing_rate, double erasure_fraction,
                                           double dominance_fraction = 0.5);

struct MetricsSettings {
  double residual_depolarizing_rate = 0.0;
  double dominance_fraction = 0.5;

  void validate() const;
};

struct MetricsReport {
  std::uint64_t n_transactions = 0;
  std::uint64_t n_committed = 0;
  std::uint64_t n_aborted_temporal = 0;
  std::uint64_t n_aborted_physical = 0;
  std::uint64_t n_generated = 0;
  std::uint64_t n_consumed = 0;
  std::uint64_t n_expired = 0;
  std::uint64_t n_available_end = 0;
  std::uint64_t n_released = 0;
  std::optional<double> abort_rate;  // absent without transactions
  std::optional<double> commit_rate;
  std::optional<double> mean_tau_c_realized_ns;  // over committed txns
  std::optional<double> mean_tau_p_ns;
  std::optional<double> mean_compute_window_ns;
  std::uint64_t n_infeasible_windows = 0;
  std::uint64_t n_records = 0;
  std::uint64_t n_erasure_records = 0;
  std::uint64_t n_depolarizing_records = 0;
  std::uint64_t n_pauli_records = 0;
  // Over classified noise records (erasure + depolarizing); Pauli-frame
  // bookkeeping records are not noise and are excluded.
  std::optional<double> erasure_fraction;
  std::optional<double> depolarizing_fraction;
  double residual_depolarizing_rate = 0.0;
  ThresholdVerdict threshold_verdict = ThresholdVerdict::WithinDepolarizingThreshold;
};

// tau_p of a transaction: arrival until commit start (the Reserve handshake).
Nanos protocol_latency(const Transaction& txn);

MetricsReport summarize(const RunResult& result, const TimingParams& timing, const MetricsSettings& settings = {});

struct StarvationRow {
  double eta = 0.0;
  std::uint64_t n_transactions = 0;
  std::optional<double> abort_rate;
  std::optional<double> commit_rate;
  std::optional<double> mean_compute_window_ns;
};

// One scenario at the given eta (substituted on every link), same seed.
StarvationRow starvation_point(const SimConfig& base, double eta);

enum class Exec { Serial, Parallel };

// Rows in input order. Parallel runs the points concurrently.
std::vector<StarvationRow> starvation_curve(const SimConfig& base, std::span<const double> eta_values,
                                            Exec exec = Exec::Parallel);

}  // namespace qmod
