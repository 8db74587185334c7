#include "popstab/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

#include <nlohmann/json.hpp>

#include "popstab/metrics.hpp"
#include "popstab/snapshot_io.hpp"
#include "popstab/version.hpp"

namespace popstab::report {

namespace {

using json = nlohmann::ordered_json;

std::string display_value(double value) {
  if (std::isinf(value)) return "inf";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

json value_or_inf(double value) {
  if (std::isinf(value)) return json("inf");
  return json(value);
}

/// Drops levels that are empty in both samples; they carry no
/// information and would otherwise poison the ratio-based metrics.
SnapshotPair apply_hygiene(const SnapshotPair& pair,
                           std::vector<std::string>& dropped) {
  bool any = false;
  for (std::size_t j = 0; j < pair.development.size(); ++j) {
    if (pair.development.props[j] == 0.0 && pair.review.props[j] == 0.0) {
      any = true;
      break;
    }
  }
  if (!any) return pair;

  std::vector<std::string> levels;
  std::vector<double> dev;
  std::vector<double> review;
  for (std::size_t j = 0; j < pair.development.size(); ++j) {
    if (pair.development.props[j] == 0.0 && pair.review.props[j] == 0.0) {
      dropped.push_back(pair.development.levels[j]);
      continue;
    }
    levels.push_back(pair.development.levels[j]);
    dev.push_back(pair.development.props[j]);
    review.push_back(pair.review.props[j]);
  }
  return SnapshotPair(
      ProportionVector(levels, dev, pair.development.ordinal),
      ProportionVector(levels, review, pair.review.ordinal), pair.dev_count,
      pair.review_count);
}

MetricCell compute_cell(Metric metric, const SnapshotPair& pair,
                        const Thresholds& thresholds) {
  MetricCell cell;
  try {
    MetricOutcome outcome;
    switch (metric) {
      case Metric::Psi:
        outcome = psi(pair);
        break;
      case Metric::Dpv:
        outcome = dpv(pair);
        // The max-ratio statistic is classified against the
        // user-supplied materiality threshold.
        outcome.band = outcome.value > thresholds.delta
                           ? Band::SubstantialChange
                           : Band::NoChange;
        break;
      case Metric::EffectSize:
        outcome = gamma(pair, thresholds.gamma_cutoff);
        break;
      case Metric::Overlapping:
        outcome = overlap(pair);
        if (thresholds.overlap_threshold) {
          outcome.band = outcome.value < *thresholds.overlap_threshold
                             ? Band::SubstantialChange
                             : Band::NoChange;
        }
        break;
      case Metric::Ks:
        outcome = ks(pair);
        break;
      case Metric::Pai:
        throw StabilityError(ErrorCode::InvalidArgument,
                             "the accuracy index needs raw samples, not "
                             "snapshots");
    }
    cell.outcome = outcome;
  } catch (const StabilityError& error) {
    cell.error = to_string(error.code());
  }
  return cell;
}

mc::SelectorKind selector_for(Metric metric) {
  switch (metric) {
    case Metric::Psi: return mc::SelectorKind::Psi;
    case Metric::Dpv: return mc::SelectorKind::Dpv;
    case Metric::EffectSize: return mc::SelectorKind::EffectSizeGamma;
    case Metric::Overlapping:
      return mc::SelectorKind::OverlappingComplement;
    case Metric::Ks: return mc::SelectorKind::Ks;
    default:
      throw StabilityError(ErrorCode::InvalidArgument,
                           "no null distribution for this metric");
  }
}

}  // namespace

const MetricCell* Row::cell(Metric metric) const {
  const auto it = cells.find(metric);
  return it == cells.end() ? nullptr : &it->second;
}

bool StabilityReport::any_substantial() const {
  for (const auto& row : rows) {
    for (const auto& [metric, cell] : row.cells) {
      if (cell.outcome && cell.outcome->band == Band::SubstantialChange) {
        return true;
      }
    }
  }
  return false;
}

std::vector<Metric> default_metrics() {
  return {Metric::Psi, Metric::Dpv, Metric::EffectSize, Metric::Overlapping,
          Metric::Ks};
}

std::optional<Metric> metric_from_string(const std::string& name) {
  if (name == "psi") return Metric::Psi;
  if (name == "dpv") return Metric::Dpv;
  if (name == "effect_size" || name == "gamma") return Metric::EffectSize;
  if (name == "overlapping" || name == "overlap")
    return Metric::Overlapping;
  if (name == "ks") return Metric::Ks;
  if (name == "pai") return Metric::Pai;
  return std::nullopt;
}

StabilityReport build_report(const io::SnapshotData& data,
                             const std::vector<Metric>& metrics,
                             const Thresholds& thresholds,
                             std::uint64_t seed) {
  StabilityReport report;
  report.metadata.version = kVersion;
  report.metadata.generator = kGeneratorName;
  report.metadata.created_utc = current_utc_timestamp();
  report.metadata.seed = seed;
  report.metadata.thresholds = thresholds;

  for (const auto& [name, pair] : data.attributes) {
    Row row;
    row.attribute = name;
    row.data = apply_hygiene(pair, row.dropped_levels);
    for (Metric metric : metrics) {
      MetricCell cell = compute_cell(metric, row.data, thresholds);
      if (cell.outcome && !row.dropped_levels.empty()) {
        cell.outcome->flags.push_back(Diagnostic::EmptyLevelDropped);
      }
      row.cells[metric] = std::move(cell);
    }
    if (!row.dropped_levels.empty()) {
      std::string note = "levels empty in both samples were dropped:";
      for (const auto& level : row.dropped_levels) note += " '" + level + "'";
      row.notes.push_back(note);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void attach_mc(StabilityReport& report, Metric metric, long b, double alpha,
               std::optional<long> m_override, std::uint64_t seed,
               bool critical_only) {
  report.metadata.mc_b = b;
  report.metadata.thresholds.alpha = alpha;
  const mc::MetricSelector selector{selector_for(metric)};

  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    Row& row = report.rows[r];
    auto it = row.cells.find(metric);
    if (it == row.cells.end()) continue;
    MetricCell& cell = it->second;

    long m = 0;
    if (m_override) {
      m = *m_override;
    } else if (row.data.review_count) {
      m = *row.data.review_count;
    } else {
      cell.error = cell.error.value_or("") +
                   (cell.error ? "; " : "") +
                   "InvalidArgument: no review sample size for the null "
                   "simulation";
      continue;
    }
    report.metadata.mc_m = m_override;

    try {
      // Each row gets its own stream so attribute order, not shared
      // draws, determines reproducibility.
      const std::uint64_t row_seed = mc::stream_seed(seed, 0x5EED + r);
      const mc::McConfig cfg(m, b, alpha, row_seed);
      if (critical_only) {
        const mc::McResult result =
            mc::critical_value(selector, row.data.development, cfg);
        cell.critical_value = result.critical_value;
      } else {
        const mc::McResult result = mc::p_value(selector, row.data, cfg);
        cell.critical_value = result.critical_value;
        cell.p_value = result.p_value;
      }
    } catch (const StabilityError& error) {
      if (!cell.error) cell.error = to_string(error.code());
    }
  }
}

std::string current_utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

std::string render_json(const StabilityReport& report) {
  json doc;
  json meta;
  meta["tool"] = report.metadata.tool;
  meta["version"] = report.metadata.version;
  meta["generator"] = report.metadata.generator;
  meta["created_utc"] = report.metadata.created_utc;
  meta["seed"] = report.metadata.seed;
  if (report.metadata.mc_b) meta["mc_b"] = *report.metadata.mc_b;
  if (report.metadata.mc_m) meta["mc_m"] = *report.metadata.mc_m;
  json thresholds;
  thresholds["delta"] = report.metadata.thresholds.delta;
  thresholds["gamma_cutoff"] = report.metadata.thresholds.gamma_cutoff;
  if (report.metadata.thresholds.overlap_threshold) {
    thresholds["overlap_threshold"] =
        *report.metadata.thresholds.overlap_threshold;
  }
  thresholds["alpha"] = report.metadata.thresholds.alpha;
  meta["thresholds"] = thresholds;
  doc["metadata"] = meta;

  doc["rows"] = json::array();
  for (const auto& row : report.rows) {
    json entry;
    entry["attribute"] = row.attribute;
    entry["ordinal"] = row.data.development.ordinal;
    entry["levels"] = row.data.development.levels;
    entry["dev_props"] = row.data.development.props;
    entry["review_props"] = row.data.review.props;
    if (row.data.dev_count) entry["dev_count"] = *row.data.dev_count;
    if (row.data.review_count)
      entry["review_count"] = *row.data.review_count;
    if (!row.dropped_levels.empty())
      entry["dropped_levels"] = row.dropped_levels;
    if (!row.notes.empty()) entry["notes"] = row.notes;

    json metrics = json::object();
    for (const auto& [metric, cell] : row.cells) {
      json cell_json;
      if (cell.error) {
        cell_json["error"] = *cell.error;
      }
      if (cell.outcome) {
        cell_json["value"] = value_or_inf(cell.outcome->value);
        cell_json["band"] = to_string(cell.outcome->band);
        json flags = json::array();
        for (auto flag : cell.outcome->flags) flags.push_back(to_string(flag));
        cell_json["flags"] = flags;
      }
      if (cell.p_value) cell_json["p_value"] = *cell.p_value;
      if (cell.critical_value)
        cell_json["critical_value"] = value_or_inf(*cell.critical_value);
      metrics[to_string(metric)] = cell_json;
    }
    entry["metrics"] = metrics;
    doc["rows"].push_back(entry);
  }
  return doc.dump(2);
}

std::string render_text(const StabilityReport& report) {
  std::vector<Metric> columns;
  for (const auto& row : report.rows) {
    for (const auto& [metric, cell] : row.cells) {
      if (std::find(columns.begin(), columns.end(), metric) ==
          columns.end()) {
        columns.push_back(metric);
      }
    }
    break;  // all rows share the metric set
  }
  bool any_p = false;
  for (const auto& row : report.rows) {
    for (const auto& [metric, cell] : row.cells) {
      if (cell.p_value || cell.critical_value) any_p = true;
    }
  }

  auto cell_text = [&](const MetricCell& cell) -> std::string {
    if (cell.outcome) {
      std::string text = display_value(cell.outcome->value);
      if (cell.outcome->band == Band::SubstantialChange) text += " !";
      return text;
    }
    return "err:" + cell.error.value_or("Unknown");
  };

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"Variable"};
  for (Metric metric : columns) {
    std::string name = to_string(metric);
    header.push_back(name);
    if (any_p) {
      header.push_back("p(" + name + ")");
      header.push_back("crit(" + name + ")");
    }
  }
  grid.push_back(header);
  for (const auto& row : report.rows) {
    std::vector<std::string> line{row.attribute};
    for (Metric metric : columns) {
      const MetricCell* cell = row.cell(metric);
      line.push_back(cell ? cell_text(*cell) : "-");
      if (any_p) {
        line.push_back(cell && cell->p_value ? display_value(*cell->p_value)
                                             : "-");
        line.push_back(cell && cell->critical_value
                           ? display_value(*cell->critical_value)
                           : "-");
      }
    }
    grid.push_back(line);
  }

  std::vector<std::size_t> widths(grid.front().size(), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      widths[i] = std::max(widths[i], line[i].size());
    }
  }

  std::ostringstream out;
  out << "Thresholds: delta=" << report.metadata.thresholds.delta
      << " gamma_cutoff=" << report.metadata.thresholds.gamma_cutoff;
  if (report.metadata.thresholds.overlap_threshold) {
    out << " overlap_threshold="
        << *report.metadata.thresholds.overlap_threshold;
  }
  if (report.metadata.mc_b) {
    out << " alpha=" << report.metadata.thresholds.alpha
        << " b=" << *report.metadata.mc_b;
  }
  out << "  ('!' marks a substantial change)\n";
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      out << line[i];
      if (i + 1 < line.size()) {
        out << std::string(widths[i] - line[i].size() + 2, ' ');
      }
    }
    out << "\n";
  }
  for (const auto& row : report.rows) {
    for (const auto& note : row.notes) {
      out << "note (" << row.attribute << "): " << note << "\n";
    }
  }
  return out.str();
}

std::string render_csv(const StabilityReport& report) {
  std::ostringstream out;
  out << "attribute,metric,value,band,flags,p_value,critical_value\n";
  for (const auto& row : report.rows) {
    for (const auto& [metric, cell] : row.cells) {
      out << row.attribute << ',' << to_string(metric) << ',';
      if (cell.outcome) {
        out << (cell.outcome->is_infinite()
                    ? "inf"
                    : io::format_full(cell.outcome->value))
            << ',' << to_string(cell.outcome->band) << ',';
        std::string flags;
        for (auto flag : cell.outcome->flags) {
          if (!flags.empty()) flags += ';';
          flags += to_string(flag);
        }
        out << flags;
      } else {
        out << "err:" << cell.error.value_or("Unknown") << ",,";
      }
      out << ',';
      if (cell.p_value) out << io::format_full(*cell.p_value);
      out << ',';
      if (cell.critical_value) {
        out << (std::isinf(*cell.critical_value)
                    ? "inf"
                    : io::format_full(*cell.critical_value));
      }
      out << "\n";
    }
  }
  return out.str();
}

int exit_status(const StabilityReport& report) {
  return report.any_substantial() ? 2 : 0;
}

}  // namespace popstab::report
