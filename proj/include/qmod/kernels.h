#pragma once

// Data-parallel sweeps. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::parallel that must
// produce identical results (same per-element arithmetic, results written
// by index, merged in input order).

#include <cstdint>
#include <span>
#include <vector>

#include "qmod/metrics.h"
#include "qmod/scaling_model.h"
#include "qmod/timing_bounds.h"

namespace qmod::kernels {

struct CostSample {
  double n = 0.0;
  double homogeneous = 0.0;
  double modular = 0.0;
};

// n_lo * ratio^k, `count` points spanning [n_lo, n_hi] in log space.
std::vector<double> log_grid(double n_lo, double n_hi, int count);

namespace serial {
std::vector<CostSample> cost_curve(const ScalingParams& p, std::span<const double> n_grid);
std::vector<double> latency_curve(const TimingParams& t, std::span<const double> n_grid);
// Draws where modular cost is not below homogeneous at factor * N_c, or not
// above it at N_c / factor. Draws without a finite crossover count as violations.
std::uint64_t crossover_violations(std::span<const ScalingParams> draws, double factor);
std::vector<StarvationRow> starvation_curve(const SimConfig& base, std::span<const double> eta_values);
}  // namespace serial

namespace parallel {
std::vector<CostSample> cost_curve(const ScalingParams& p, std::span<const double> n_grid);
std::vector<double> latency_curve(const TimingParams& t, std::span<const double> n_grid);
std::uint64_t crossover_violations(std::span<const ScalingParams> draws, double factor);
std::vector<StarvationRow> starvation_curve(const SimConfig& base, std::span<const double> eta_values);
}  // namespace parallel

int max_threads();

}  // namespace qmod::kernels
