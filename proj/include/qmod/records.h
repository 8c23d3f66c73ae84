#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmod/metrics.h"
#include "qmod/scaling_model.h"
#include "qmod/scenario_io.h"
#include "qmod/sim_kernel.h"
#include "qmod/timing_bounds.h"

namespace qmod {

// Every machine record is one JSON object per line. Field order is fixed and
// starts with "schema" then "type".
inline constexpr int kRecordSchemaVersion = 1;
inline constexpr const char* kToolName = "qmod";
inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::ordered_json transaction_record(const Transaction& txn);
nlohmann::ordered_json failure_record(const FailureRecord& rec);
nlohmann::ordered_json metrics_record(const MetricsReport& report);
nlohmann::ordered_json manifest_record(const ScenarioFile& scenario, const RunResult& result);

std::string to_lines(const std::vector<nlohmann::ordered_json>& records);

// Fixed-width text table with a header row.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> headers) : headers_(std::move(headers)) {}
  void add_row(std::vector<std::string> cells);
  std::string render() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> headers_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fmt_real(double v);  // %.6g
std::string fmt_exact(double v);  // shortest round-trip
std::string fmt_optional(const std::optional<double>& v, const char* absent = "none");

// Both renderings of one command result.
struct CommandOutput {
  std::string table;
  std::string records;
};

struct RunArtifacts {
  CommandOutput metrics;
  CommandOutput transactions;
  CommandOutput failures;
  CommandOutput manifest;
};

RunArtifacts render_run(const ScenarioFile& scenario, const RunResult& result, const MetricsReport& report);

// Writes <dir>/{metrics,transactions,failures,manifest}.{jsonl,txt}.
void write_run_artifacts(const std::filesystem::path& dir, const RunArtifacts& artifacts);

CommandOutput crossover_output(const ScalingParams& params, std::span<const double> n_grid,
                               std::span<const double> eta_sweep);

struct RouteRange {
  double min_ns = 80.0;
  double max_ns = 150.0;
  int steps = 8;
};

CommandOutput wall_output(const TimingParams& timing, std::span<const double> n_grid, const RouteRange& range);
CommandOutput bound_output(const TimingParams& timing);
CommandOutput nops_output(std::span<const PlatformProfile> profiles);
CommandOutput starvation_output(std::span<const StarvationRow> rows);

}  // namespace qmod
