#pragma once

/// @file report.hpp
/// Stability reports: per-attribute metric outcomes with the thresholds
/// in force, optional Monte-Carlo p-values, and JSON / text / CSV
/// rendering. Reports embed the proportions they were computed from so
/// every number can be recomputed from the report alone.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popstab/mc_engine.hpp"
#include "popstab/snapshot_io.hpp"
#include "popstab/types.hpp"

namespace popstab::report {

struct Thresholds {
  double delta = 0.2;          // max-ratio statistic cutoff
  double gamma_cutoff = 0.1;   // weighted effect-size cutoff
  std::optional<double> overlap_threshold;  // off by default
  double alpha = 0.05;
};

struct MetricCell {
  std::optional<MetricOutcome> outcome;
  std::optional<std::string> error;  // error code when not computable
  std::optional<double> p_value;
  std::optional<double> critical_value;
};

struct Row {
  std::string attribute;
  SnapshotPair data;  // proportions after hygiene, as used for metrics
  std::vector<std::string> dropped_levels;  // empty on both sides
  std::map<Metric, MetricCell> cells;
  std::vector<std::string> notes;

  const MetricCell* cell(Metric metric) const;
};

struct Metadata {
  std::string tool = "popstab";
  std::string version;
  std::string generator;
  std::string created_utc;
  std::uint64_t seed = 0;
  std::optional<long> mc_b;
  std::optional<long> mc_m;
  Thresholds thresholds;
};

struct StabilityReport {
  Metadata metadata;
  std::vector<Row> rows;

  bool any_substantial() const;
};

std::vector<Metric> default_metrics();
std::optional<Metric> metric_from_string(const std::string& name);

/// Computes the requested metrics for every attribute. Levels that are
/// empty in both samples are dropped first (flagged EmptyLevelDropped);
/// metrics that cannot be computed yield an error cell, never a silent
/// omission.
StabilityReport build_report(const io::SnapshotData& data,
                             const std::vector<Metric>& metrics,
                             const Thresholds& thresholds,
                             std::uint64_t seed);

/// Attaches a Monte-Carlo p-value and critical value for `metric` to
/// every row. Row r uses an RNG stream derived from (cfg.seed, r) so the
/// whole report is reproducible from its metadata. When `m_override` is
/// absent the row's review count is used.
void attach_mc(StabilityReport& report, Metric metric, long b, double alpha,
               std::optional<long> m_override, std::uint64_t seed,
               bool critical_only = false);

std::string render_json(const StabilityReport& report);
std::string render_text(const StabilityReport& report);
std::string render_csv(const StabilityReport& report);

std::string current_utc_timestamp();

/// CLI exit status: 2 when any row classifies as a substantial change
/// under the thresholds in force, else 0.
int exit_status(const StabilityReport& report);

}  // namespace popstab::report
