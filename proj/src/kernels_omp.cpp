#include <omp.h>

#include <exception>

#include "qmod/kernels.h"

namespace qmod::kernels {

int max_threads() { return omp_get_max_threads(); }

namespace parallel {

namespace {

// Exceptions must not escape an OpenMP region; capture the first and rethrow.
class FirstError {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(qmod_first_error)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

}  // namespace

std::vector<CostSample> cost_curve(const ScalingParams& p, std::span<const double> n_grid) {
  std::vector<CostSample> out(n_grid.size());
  const auto n = static_cast<std::int64_t>(n_grid.size());
  FirstError err;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    err.run([&] {
      const double x = n_grid[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] = {x, cost_homogeneous(p, x), cost_modular(p, x)};
    });
  }
  err.rethrow();
  return out;
}

std::vector<double> latency_curve(const TimingParams& t, std::span<const double> n_grid) {
  std::vector<double> out(n_grid.size());
  const auto n = static_cast<std::int64_t>(n_grid.size());
  FirstError err;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    err.run([&] { out[static_cast<std::size_t>(i)] = coordination_latency(t, n_grid[static_cast<std::size_t>(i)]); });
  }
  err.rethrow();
  return out;
}

std::uint64_t crossover_violations(std::span<const ScalingParams> draws, double factor) {
  const auto n = static_cast<std::int64_t>(draws.size());
  std::uint64_t bad = 0;
#pragma omp parallel for schedule(static) reduction(+ : bad)
  for (std::int64_t i = 0; i < n; ++i) {
    bad += serial::crossover_violations(draws.subspan(static_cast<std::size_t>(i), 1), factor);
  }
  return bad;
}

std::vector<StarvationRow> starvation_curve(const SimConfig& base, std::span<const double> eta_values) {
  std::vector<StarvationRow> rows(eta_values.size());
  const auto n = static_cast<std::int64_t>(eta_values.size());
  FirstError err;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    err.run([&] {
      const auto k = static_cast<std::size_t>(i);
      rows[k] = starvation_point(base, eta_values[k]);
    });
  }
  err.rethrow();
  return rows;
}

}  // namespace parallel
}  // namespace qmod::kernels
