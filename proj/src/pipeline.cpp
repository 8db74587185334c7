#include "popstab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace popstab::pipeline {

scorecard::GroupedCounts counts_for_attribute(const io::PopulationData& data,
                                              std::size_t attribute_index) {
  const auto& attribute = data.attributes.at(attribute_index);
  std::vector<long> observations(attribute.levels.size(), 0);
  std::vector<long> defaults(attribute.levels.size(), 0);
  const auto& index = data.level_index.at(attribute_index);
  for (std::size_t c = 0; c < data.size(); ++c) {
    observations[index[c]] += 1;
    defaults[index[c]] += data.defaulted[c];
  }

  std::vector<std::string> levels;
  std::vector<long> kept_observations;
  std::vector<long> kept_defaults;
  for (std::size_t j = 0; j < attribute.levels.size(); ++j) {
    if (observations[j] == 0) continue;  // bucket never observed
    levels.push_back(attribute.levels[j]);
    kept_observations.push_back(observations[j]);
    kept_defaults.push_back(defaults[j]);
  }
  return scorecard::GroupedCounts(std::move(levels),
                                  std::move(kept_observations),
                                  std::move(kept_defaults));
}

FittedScorecard fit_scorecard(const io::PopulationData& development,
                              double smoothing) {
  FittedScorecard result;
  const std::size_t n = development.size();
  const std::size_t n_attrs = development.attributes.size();

  // Per-attribute WOE lookup by raw level index.
  std::vector<std::vector<double>> woe_by_level(n_attrs);
  for (std::size_t a = 0; a < n_attrs; ++a) {
    const auto counts = counts_for_attribute(development, a);
    const auto table = scorecard::woe(counts, smoothing);
    result.information_values.push_back(scorecard::iv(counts, smoothing));
    result.attribute_names.push_back(development.attributes[a].name);
    result.model.attributes.emplace_back(development.attributes[a].name,
                                         table);

    auto& lookup = woe_by_level[a];
    lookup.assign(development.attributes[a].levels.size(), 0.0);
    for (std::size_t j = 0; j < development.attributes[a].levels.size();
         ++j) {
      const auto& level = development.attributes[a].levels[j];
      const auto it =
          std::find(table.levels.begin(), table.levels.end(), level);
      if (it != table.levels.end()) {
        lookup[j] = table.woe[static_cast<std::size_t>(
            it - table.levels.begin())];
      }
    }
  }

  std::vector<std::vector<double>> features(n,
                                            std::vector<double>(n_attrs));
  std::vector<int> outcomes(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t a = 0; a < n_attrs; ++a) {
      features[c][a] = woe_by_level[a][development.level_index[a][c]];
    }
    outcomes[c] = development.defaulted[c];
  }

  result.fit = scorecard::fit_logistic(features, outcomes);
  result.model.intercept = result.fit.intercept;
  result.model.coefficients = result.fit.coefficients;
  result.model.separation_suspected = result.fit.separation_suspected;
  return result;
}

std::vector<double> predict_population(const scorecard::ScorecardModel& model,
                                       const io::PopulationData& data) {
  const std::size_t n_attrs = data.attributes.size();
  if (model.attributes.size() != n_attrs) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "model and data disagree on the attribute list");
  }

  // Resolve each data level to its model WOE once.
  std::vector<std::vector<double>> woe_by_level(n_attrs);
  for (std::size_t a = 0; a < n_attrs; ++a) {
    const auto& [name, table] = model.attributes[a];
    if (name != data.attributes[a].name) {
      throw StabilityError(ErrorCode::StructuralMismatch,
                           "attribute order mismatch at '" + name + "'");
    }
    auto& lookup = woe_by_level[a];
    const auto& levels = data.attributes[a].levels;
    lookup.reserve(levels.size());
    for (const auto& level : levels) {
      const auto it =
          std::find(table.levels.begin(), table.levels.end(), level);
      if (it == table.levels.end()) {
        // Levels absent from the data are placeholders in the lookup;
        // hitting one at prediction time is an error.
        lookup.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        lookup.push_back(table.woe[static_cast<std::size_t>(
            it - table.levels.begin())]);
      }
    }
  }

  std::vector<double> pds(data.size());
  for (std::size_t c = 0; c < data.size(); ++c) {
    double score = model.intercept;
    for (std::size_t a = 0; a < n_attrs; ++a) {
      const double woe_value = woe_by_level[a][data.level_index[a][c]];
      if (std::isnan(woe_value)) {
        throw StabilityError(
            ErrorCode::UnknownLevel,
            "level '" +
                data.attributes[a].levels[data.level_index[a][c]] +
                "' of attribute '" + data.attributes[a].name +
                "' is not in the model");
      }
      score += model.coefficients[a] * woe_value;
    }
    pds[c] = 1.0 / (1.0 + std::exp(-score));
  }
  return pds;
}

}  // namespace popstab::pipeline
