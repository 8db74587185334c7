#pragma once

/// @file reproduce.hpp
/// One-shot reproduction of the three built-in benchmark scenarios:
/// simulates development/review populations, computes the four table
/// metrics per attribute plus the PD-groups row, and compares the
/// outcome side by side against the bundled reference values (which are
/// themselves sampled once at size 10 000 and labelled accordingly).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "popstab/pipeline.hpp"
#include "popstab/population_sim.hpp"
#include "popstab/report.hpp"
#include "popstab/version.hpp"

namespace popstab::repro {

/// Label used for the PD-group stability row in reports and tables.
inline constexpr const char* kPdGroupsRow = "PDGroups";
inline constexpr int kPdGroupCount = 10;

/// Reference table entry: one attribute row of one scenario.
struct ReferenceRow {
  const char* attribute;
  double psi;
  double dpv;
  double effect_size;
  double overlapping;
  bool psi_infinite;
};

const std::vector<ReferenceRow>& reference_rows(sim::ScenarioKind kind);

enum class CellStatus {
  Pass,      // gated comparison within tolerance
  Fail,      // gated comparison out of tolerance
  Info,      // reported only (no analytic anchor, or the reference draw
             // itself sits outside the sampling envelope)
  Incident,  // the development-empty-bucket infinity
  Skipped,   // metric not computable on this cell
};
std::string to_string(CellStatus status);

struct ComparisonCell {
  std::string scenario;
  std::string attribute;
  Metric metric = Metric::Psi;
  std::optional<double> reference;
  bool reference_infinite = false;
  std::optional<double> sampled;
  bool sampled_infinite = false;
  std::optional<std::string> sampled_error;
  std::optional<double> analytic;
  double tolerance = 0.0;   // max(0.02, 3 sigma)
  double sigma = 0.0;       // delta-method sampling scale of the cell
  std::optional<bool> within_002;  // literal |sampled - reference| <= 0.02
  CellStatus status = CellStatus::Info;
  std::string note;
};

struct ScenarioResult {
  sim::ScenarioKind kind = sim::ScenarioKind::Stable;
  std::string name;
  report::StabilityReport report;
  io::SnapshotData snapshot;
  sim::SimulatedPopulation development;
  sim::SimulatedPopulation review;
  double analytic_dev_mean = 0.0;
  double analytic_review_mean = 0.0;
  double sampled_dev_rate = 0.0;
  double sampled_review_rate = 0.0;
  pipeline::FittedScorecard scorecard;
};

struct ReproduceResult {
  long size = 0;
  std::uint64_t seed = 0;
  long b = 0;
  std::vector<ScenarioResult> scenarios;
  std::vector<ComparisonCell> cells;
  std::vector<std::string> gate_failures;

  bool pass() const { return gate_failures.empty(); }
};

struct ReproduceOptions {
  long size = 10000;
  std::uint64_t seed = kDefaultSeed;
  long b = 1000;        // null replications for the attached p-values
  bool with_pvalues = true;
};

ReproduceResult run(const ReproduceOptions& options);

std::string render_comparison_text(const ReproduceResult& result);
std::string render_comparison_json(const ReproduceResult& result);

/// Writes per-scenario reports (json + text), snapshots, population
/// CSVs and the comparison table into `out_dir`.
void write_outputs(const ReproduceResult& result,
                   const std::string& out_dir);

}  // namespace popstab::repro
