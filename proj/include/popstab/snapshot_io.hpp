#pragma once

/// @file snapshot_io.hpp
/// File formats: the attribute snapshot CSV consumed by the metric
/// commands and the customer-level population CSV written by the
/// simulator. Both are UTF-8, `#` starts a comment line, and the header
/// row is mandatory.
///
/// Snapshot schema (one row per attribute level):
///   attribute,level,level_order,dev_prop,review_prop,ordinal
/// or, mutually exclusive with proportions:
///   attribute,level,level_order,dev_count,review_count,ordinal
///
/// Population schema (one row per customer):
///   <attribute names...>,true_pd,defaulted

#include <optional>
#include <string>
#include <vector>

#include "popstab/population_sim.hpp"
#include "popstab/types.hpp"

namespace popstab::io {

struct AttributeSnapshot {
  std::string name;
  SnapshotPair pair;
};

struct SnapshotData {
  std::vector<AttributeSnapshot> attributes;
  bool from_counts = false;
};

SnapshotData parse_snapshot_csv(const std::string& text);
SnapshotData read_snapshot_file(const std::string& path);

/// Writes proportions with full precision (counts when available and
/// `prefer_counts` is set). `comments` go into leading `#` lines.
std::string snapshot_to_csv(const SnapshotData& data, bool prefer_counts,
                            const std::vector<std::string>& comments);
void write_snapshot_file(const std::string& path, const SnapshotData& data,
                         bool prefer_counts,
                         const std::vector<std::string>& comments);

/// Columnar customer-level data, the common shape behind simulated
/// populations and population CSV files.
struct PopulationData {
  struct Attribute {
    std::string name;
    std::vector<std::string> levels;  // first-appearance order for files
  };
  std::vector<Attribute> attributes;
  std::vector<std::vector<std::uint8_t>> level_index;  // [attr][customer]
  std::vector<std::uint8_t> defaulted;
  std::vector<double> true_pd;  // empty when the file carries none

  std::size_t size() const { return defaulted.size(); }
};

PopulationData to_population_data(const sim::SimulatedPopulation& pop);
PopulationData read_population_csv(const std::string& path);
void write_population_csv(const std::string& path,
                          const sim::SimulatedPopulation& pop,
                          const std::vector<std::string>& comments);

/// Exact textual round-trip formatting for doubles.
std::string format_full(double value);

}  // namespace popstab::io
