#pragma once

/// @file pipeline.hpp
/// Glue between customer-level data and the scorecard primitives:
/// per-attribute grouping counts, a fitted WOE-logistic model, and
/// population-wide PD prediction.

#include <vector>

#include "popstab/scorecard.hpp"
#include "popstab/snapshot_io.hpp"

namespace popstab::pipeline {

/// Counts per observed level (levels never seen in the data are left
/// out: they cannot enter the model).
scorecard::GroupedCounts counts_for_attribute(const io::PopulationData& data,
                                              std::size_t attribute_index);

struct FittedScorecard {
  scorecard::ScorecardModel model;
  scorecard::LogisticFit fit;
  std::vector<std::string> attribute_names;
  std::vector<scorecard::IvResult> information_values;
};

/// Builds WOE tables per attribute on the development data, fits the
/// logistic regression on the per-customer WOE features and reports the
/// per-attribute information values.
FittedScorecard fit_scorecard(const io::PopulationData& development,
                              double smoothing = 0.0);

/// Predicted PDs for every customer. Every level in `data` must exist
/// in the corresponding model WOE table.
std::vector<double> predict_population(const scorecard::ScorecardModel& model,
                                       const io::PopulationData& data);

}  // namespace popstab::pipeline
