#include <cmath>

#include "qmod/errors.h"
#include "qmod/kernels.h"

namespace qmod::kernels {

std::vector<double> log_grid(double n_lo, double n_hi, int count) {
  if (!(n_lo >= 1.0) || !(n_hi >= n_lo) || count < 2) throw ConfigError("log grid needs 1 <= lo <= hi and >= 2 points");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = std::log10(n_hi / n_lo) / (count - 1);
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = n_lo * std::pow(10.0, step * k);
  out.back() = n_hi;
  return out;
}

namespace serial {

std::vector<CostSample> cost_curve(const ScalingParams& p, std::span<const double> n_grid) {
  std::vector<CostSample> out(n_grid.size());
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    out[i] = {n_grid[i], cost_homogeneous(p, n_grid[i]), cost_modular(p, n_grid[i])};
  }
  return out;
}

std::vector<double> latency_curve(const TimingParams& t, std::span<const double> n_grid) {
  std::vector<double> out(n_grid.size());
  for (std::size_t i = 0; i < n_grid.size(); ++i) out[i] = coordination_latency(t, n_grid[i]);
  return out;
}

std::uint64_t crossover_violations(std::span<const ScalingParams> draws, double factor) {
  std::uint64_t bad = 0;
  for (const auto& p : draws) {
    const auto nc = crossover_scale(p);
    if (!nc || *nc / factor < 1.0) {
      ++bad;
      continue;
    }
    const double above = *nc * factor;
    const double below = *nc / factor;
    if (!(cost_modular(p, above) < cost_homogeneous(p, above)) ||
        !(cost_modular(p, below) > cost_homogeneous(p, below))) {
      ++bad;
    }
  }
  return bad;
}

std::vector<StarvationRow> starvation_curve(const SimConfig& base, std::span<const double> eta_values) {
  std::vector<StarvationRow> rows;
  rows.reserve(eta_values.size());
  for (double eta : eta_values) rows.push_back(starvation_point(base, eta));
  return rows;
}

}  // namespace serial
}  // namespace qmod::kernels
