#include "qmod/metrics.h"

#include "qmod/errors.h"
#include "qmod/kernels.h"

namespace qmod {

const char* to_string(ThresholdVerdict v) {
  switch (v) {
    case ThresholdVerdict::WithinDepolarizingThreshold: return "within_depolarizing_threshold";
    case ThresholdVerdict::WithinErasureRegimeOnly: return "within_erasure_regime_only";
    case ThresholdVerdict::AboveAllThresholds: return "above_all_thresholds";
  }
  return "?";
}

ComputeWindow compute_window(Nanos tau_q, Nanos tau_c, Nanos tau_p) {
  const Nanos w = tau_q - (tau_c + tau_p);
  return {w, w < 0};
}

ThresholdVerdict effective_threshold_check(double residual_depolarizing_rate, double erasure_fraction,
                                           double dominance_fraction) {
  if (!(residual_depolarizing_rate >= 0.0 && residual_depolarizing_rate <= 1.0) ||
      !(erasure_fraction >= 0.0 && erasure_fraction <= 1.0)) {
    throw ConfigError("threshold check inputs must lie in [0, 1]");
  }
  if (residual_depolarizing_rate < kDepolarizingThreshold) return ThresholdVerdict::WithinDepolarizingThreshold;
  if (residual_depolarizing_rate < kErasureThreshold && erasure_fraction >= dominance_fraction) {
    return ThresholdVerdict::WithinErasureRegimeOnly;
  }
  return ThresholdVerdict::AboveAllThresholds;
}

void MetricsSettings::validate() const {
  if (!(residual_depolarizing_rate >= 0.0 && residual_depolarizing_rate <= 1.0)) {
    throw ConfigError("residual_depolarizing_rate must lie in [0, 1]");
  }
  if (!(dominance_fraction >= 0.0 && dominance_fraction <= 1.0)) {
    throw ConfigError("dominance_fraction must lie in [0, 1]");
  }
}

Nanos protocol_latency(const Transaction& txn) {
  return txn.commit_start_ns < 0 ? 0 : txn.commit_start_ns - txn.created_ns;
}

MetricsReport summarize(const RunResult& result, const TimingParams& timing, const MetricsSettings& settings) {
  settings.validate();
  MetricsReport r;
  r.n_transactions = result.transactions.size();
  double sum_tc = 0.0;
  double sum_tp = 0.0;
  double sum_window = 0.0;
  for (const auto& txn : result.transactions) {
    switch (txn.state) {
      case TxnState::Committed: {
        ++r.n_committed;
        const Nanos tp = protocol_latency(txn);
        const auto window = compute_window(timing.tau_q, txn.coordination_ns, tp);
        sum_tc += static_cast<double>(txn.coordination_ns);
        sum_tp += static_cast<double>(tp);
        sum_window += static_cast<double>(window.tau_compute_ns);
        if (window.infeasible) ++r.n_infeasible_windows;
        break;
      }
      case TxnState::AbortedTemporal: ++r.n_aborted_temporal; break;
      case TxnState::AbortedPhysical: ++r.n_aborted_physical; break;
      default: break;
    }
  }
  if (r.n_transactions > 0) {
    const double n = static_cast<double>(r.n_transactions);
    r.abort_rate = static_cast<double>(r.n_aborted_temporal + r.n_aborted_physical) / n;
    r.commit_rate = static_cast<double>(r.n_committed) / n;
  }
  if (r.n_committed > 0) {
    const double n = static_cast<double>(r.n_committed);
    r.mean_tau_c_realized_ns = sum_tc / n;
    r.mean_tau_p_ns = sum_tp / n;
    r.mean_compute_window_ns = sum_window / n;
  }

  r.n_generated = result.ledger.generated;
  r.n_consumed = result.ledger.consumed;
  r.n_expired = result.ledger.expired;
  r.n_available_end = result.ledger.available;
  r.n_released = result.ledger.released;

  r.n_records = result.records.size();
  for (const auto& rec : result.records) {
    switch (rec.classification) {
      case Classification::ErasureMarker: ++r.n_erasure_records; break;
      case Classification::DepolarizingNoise: ++r.n_depolarizing_records; break;
      case Classification::PauliFrameUpdate: ++r.n_pauli_records; break;
    }
  }
  const std::uint64_t noise = r.n_erasure_records + r.n_depolarizing_records;
  if (noise > 0) {
    r.erasure_fraction = static_cast<double>(r.n_erasure_records) / static_cast<double>(noise);
    r.depolarizing_fraction = static_cast<double>(r.n_depolarizing_records) / static_cast<double>(noise);
  }
  r.residual_depolarizing_rate = settings.residual_depolarizing_rate;
  r.threshold_verdict = effective_threshold_check(settings.residual_depolarizing_rate, r.erasure_fraction.value_or(0.0),
                                                  settings.dominance_fraction);
  return r;
}

StarvationRow starvation_point(const SimConfig& base, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
  SimConfig cfg = base;
  for (auto& link : cfg.links) link.eta_trans = eta;
  const auto report = summarize(run_scenario(cfg), cfg.timing);
  return {eta, report.n_transactions, report.abort_rate, report.commit_rate, report.mean_compute_window_ns};
}

std::vector<StarvationRow> starvation_curve(const SimConfig& base, std::span<const double> eta_values, Exec exec) {
  for (double eta : eta_values) {
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
  }
  base.validate();
  return exec == Exec::Serial ? kernels::serial::starvation_curve(base, eta_values)
                              : kernels::parallel::starvation_curve(base, eta_values);
}

}  // namespace qmod
