#include "popstab/snapshot_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace popstab::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

[[noreturn]] void parse_fail(std::size_t line_number,
                             const std::string& message) {
  throw StabilityError(ErrorCode::ParseError,
                       "line " + std::to_string(line_number) + ": " +
                           message);
}

double parse_double(const std::string& text, std::size_t line_number) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    if (consumed != text.size()) {
      parse_fail(line_number, "trailing characters in number '" + text + "'");
    }
    return value;
  } catch (const std::invalid_argument&) {
    parse_fail(line_number, "expected a number, got '" + text + "'");
  } catch (const std::out_of_range&) {
    parse_fail(line_number, "number out of range: '" + text + "'");
  }
}

long parse_count(const std::string& text, std::size_t line_number) {
  try {
    std::size_t consumed = 0;
    const long value = std::stol(text, &consumed);
    if (consumed != text.size() || value < 0) {
      parse_fail(line_number, "expected a non-negative count, got '" + text +
                                  "'");
    }
    return value;
  } catch (const std::invalid_argument&) {
    parse_fail(line_number, "expected a count, got '" + text + "'");
  } catch (const std::out_of_range&) {
    parse_fail(line_number, "count out of range: '" + text + "'");
  }
}

bool parse_bool(const std::string& text, std::size_t line_number) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  parse_fail(line_number, "expected true/false, got '" + text + "'");
}

struct LevelRow {
  std::string level;
  long order = 0;
  double dev = 0.0;
  double review = 0.0;
  bool ordinal = false;
  std::size_t line_number = 0;
};

}  // namespace

std::string format_full(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

SnapshotData parse_snapshot_csv(const std::string& text) {
  std::stringstream stream(text);
  std::string line;
  std::size_t line_number = 0;

  std::optional<std::vector<std::string>> header;
  bool counts_mode = false;
  // Attribute order follows first appearance in the file.
  std::vector<std::string> attribute_order;
  std::map<std::string, std::vector<LevelRow>> rows;

  while (std::getline(stream, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_csv_line(line);

    if (!header) {
      header = fields;
      const std::vector<std::string> prop_header = {
          "attribute", "level", "level_order", "dev_prop", "review_prop",
          "ordinal"};
      const std::vector<std::string> count_header = {
          "attribute", "level", "level_order", "dev_count", "review_count",
          "ordinal"};
      if (fields == prop_header) {
        counts_mode = false;
      } else if (fields == count_header) {
        counts_mode = true;
      } else {
        parse_fail(line_number,
                   "header must declare attribute,level,level_order,"
                   "dev_prop,review_prop,ordinal or the *_count variant");
      }
      continue;
    }

    if (fields.size() != 6) {
      parse_fail(line_number, "expected 6 fields, got " +
                                  std::to_string(fields.size()));
    }
    LevelRow row;
    row.level = fields[1];
    row.order = parse_count(fields[2], line_number);
    if (counts_mode) {
      row.dev = static_cast<double>(parse_count(fields[3], line_number));
      row.review = static_cast<double>(parse_count(fields[4], line_number));
    } else {
      row.dev = parse_double(fields[3], line_number);
      row.review = parse_double(fields[4], line_number);
    }
    row.ordinal = parse_bool(fields[5], line_number);
    row.line_number = line_number;

    const std::string& attribute = fields[0];
    if (rows.find(attribute) == rows.end()) {
      attribute_order.push_back(attribute);
    }
    rows[attribute].push_back(row);
  }

  if (!header) {
    throw StabilityError(ErrorCode::ParseError, "missing header row");
  }
  if (attribute_order.empty()) {
    throw StabilityError(ErrorCode::ParseError, "no attribute rows");
  }

  SnapshotData data;
  data.from_counts = counts_mode;
  for (const auto& attribute : attribute_order) {
    auto& level_rows = rows[attribute];
    std::stable_sort(level_rows.begin(), level_rows.end(),
                     [](const LevelRow& a, const LevelRow& b) {
                       return a.order < b.order;
                     });
    for (std::size_t j = 1; j < level_rows.size(); ++j) {
      if (level_rows[j].order == level_rows[j - 1].order) {
        parse_fail(level_rows[j].line_number,
                   "duplicate level_order for attribute '" + attribute +
                       "'");
      }
    }

    std::vector<std::string> levels;
    std::vector<double> dev;
    std::vector<double> review;
    bool ordinal = level_rows.front().ordinal;
    for (const auto& row : level_rows) {
      if (row.ordinal != ordinal) {
        parse_fail(row.line_number, "inconsistent ordinal flag within '" +
                                        attribute + "'");
      }
      levels.push_back(row.level);
      dev.push_back(row.dev);
      review.push_back(row.review);
    }

    std::optional<long> dev_count;
    std::optional<long> review_count;
    const double dev_sum = std::accumulate(dev.begin(), dev.end(), 0.0);
    const double review_sum =
        std::accumulate(review.begin(), review.end(), 0.0);
    if (counts_mode) {
      if (dev_sum <= 0.0 || review_sum <= 0.0) {
        parse_fail(level_rows.front().line_number,
                   "attribute '" + attribute + "' has an empty sample");
      }
      dev_count = static_cast<long>(dev_sum);
      review_count = static_cast<long>(review_sum);
    } else {
      if (std::abs(dev_sum - 1.0) > 1e-6 ||
          std::abs(review_sum - 1.0) > 1e-6) {
        parse_fail(level_rows.front().line_number,
                   "proportions of attribute '" + attribute +
                       "' must sum to 1 within 1e-6");
      }
    }
    for (auto& value : dev) value /= dev_sum;
    for (auto& value : review) value /= review_sum;

    try {
      data.attributes.push_back(
          {attribute,
           SnapshotPair(ProportionVector(levels, dev, ordinal),
                        ProportionVector(levels, review, ordinal), dev_count,
                        review_count)});
    } catch (const StabilityError& error) {
      parse_fail(level_rows.front().line_number,
                 "attribute '" + attribute + "': " + error.what());
    }
  }
  return data;
}

SnapshotData read_snapshot_file(const std::string& path) {
  std::ifstream input(path);
  if (!input) {
    throw StabilityError(ErrorCode::ParseError,
                         "cannot open snapshot file: " + path);
  }
  std::stringstream buffer;
  buffer << input.rdbuf();
  return parse_snapshot_csv(buffer.str());
}

std::string snapshot_to_csv(const SnapshotData& data, bool prefer_counts,
                            const std::vector<std::string>& comments) {
  bool counts = prefer_counts;
  for (const auto& [name, pair] : data.attributes) {
    if (!pair.dev_count || !pair.review_count) counts = false;
  }

  std::ostringstream out;
  for (const auto& comment : comments) {
    out << "# " << comment << "\n";
  }
  out << "attribute,level,level_order,"
      << (counts ? "dev_count,review_count" : "dev_prop,review_prop")
      << ",ordinal\n";
  for (const auto& [name, pair] : data.attributes) {
    for (std::size_t j = 0; j < pair.development.size(); ++j) {
      out << name << ',' << pair.development.levels[j] << ',' << j << ',';
      if (counts) {
        const double dev_total = static_cast<double>(*pair.dev_count);
        const double review_total = static_cast<double>(*pair.review_count);
        out << std::llround(pair.development.props[j] * dev_total) << ','
            << std::llround(pair.review.props[j] * review_total);
      } else {
        out << format_full(pair.development.props[j]) << ','
            << format_full(pair.review.props[j]);
      }
      out << ',' << (pair.development.ordinal ? "true" : "false") << "\n";
    }
  }
  return out.str();
}

void write_snapshot_file(const std::string& path, const SnapshotData& data,
                         bool prefer_counts,
                         const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) {
    throw StabilityError(ErrorCode::ParseError,
                         "cannot write snapshot file: " + path);
  }
  out << snapshot_to_csv(data, prefer_counts, comments);
}

PopulationData to_population_data(const sim::SimulatedPopulation& pop) {
  PopulationData data;
  for (const auto& attribute : pop.attributes) {
    data.attributes.push_back({attribute.name, attribute.levels});
  }
  data.level_index = pop.level_index;
  data.defaulted = pop.defaulted;
  data.true_pd = pop.true_pd;
  return data;
}

PopulationData read_population_csv(const std::string& path) {
  std::ifstream input(path);
  if (!input) {
    throw StabilityError(ErrorCode::ParseError,
                         "cannot open population file: " + path);
  }

  PopulationData data;
  std::string line;
  std::size_t line_number = 0;
  bool have_header = false;
  bool has_true_pd = false;
  std::size_t n_attrs = 0;

  while (std::getline(input, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_csv_line(line);

    if (!have_header) {
      have_header = true;
      if (fields.size() < 2 || fields.back() != "defaulted") {
        parse_fail(line_number,
                   "population header must end with [true_pd,]defaulted");
      }
      std::size_t attr_end = fields.size() - 1;
      if (attr_end >= 1 && fields[attr_end - 1] == "true_pd") {
        has_true_pd = true;
        --attr_end;
      }
      if (attr_end == 0) {
        parse_fail(line_number, "population file has no attribute columns");
      }
      for (std::size_t a = 0; a < attr_end; ++a) {
        data.attributes.push_back({fields[a], {}});
      }
      n_attrs = attr_end;
      data.level_index.assign(n_attrs, {});
      continue;
    }

    const std::size_t expected = n_attrs + (has_true_pd ? 2 : 1);
    if (fields.size() != expected) {
      parse_fail(line_number, "expected " + std::to_string(expected) +
                                  " fields, got " +
                                  std::to_string(fields.size()));
    }
    for (std::size_t a = 0; a < n_attrs; ++a) {
      auto& levels = data.attributes[a].levels;
      const auto it =
          std::find(levels.begin(), levels.end(), fields[a]);
      std::size_t idx;
      if (it == levels.end()) {
        idx = levels.size();
        if (idx > 255) {
          parse_fail(line_number, "more than 256 levels in attribute '" +
                                      data.attributes[a].name + "'");
        }
        levels.push_back(fields[a]);
      } else {
        idx = static_cast<std::size_t>(it - levels.begin());
      }
      data.level_index[a].push_back(static_cast<std::uint8_t>(idx));
    }
    if (has_true_pd) {
      data.true_pd.push_back(parse_double(fields[n_attrs], line_number));
    }
    const std::string& outcome = fields.back();
    if (outcome != "0" && outcome != "1") {
      parse_fail(line_number, "defaulted must be 0 or 1");
    }
    data.defaulted.push_back(outcome == "1" ? 1 : 0);
  }

  if (!have_header || data.defaulted.empty()) {
    throw StabilityError(ErrorCode::ParseError,
                         "population file has no customer rows");
  }
  return data;
}

void write_population_csv(const std::string& path,
                          const sim::SimulatedPopulation& pop,
                          const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) {
    throw StabilityError(ErrorCode::ParseError,
                         "cannot write population file: " + path);
  }
  for (const auto& comment : comments) {
    out << "# " << comment << "\n";
  }
  for (const auto& attribute : pop.attributes) {
    out << attribute.name << ',';
  }
  out << "true_pd,defaulted\n";
  for (std::size_t c = 0; c < pop.size(); ++c) {
    for (std::size_t a = 0; a < pop.attributes.size(); ++a) {
      out << pop.attributes[a].levels[pop.level_index[a][c]] << ',';
    }
    out << format_full(pop.true_pd[c]) << ','
        << static_cast<int>(pop.defaulted[c]) << "\n";
  }
}

}  // namespace popstab::io
