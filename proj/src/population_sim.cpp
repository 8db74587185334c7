#include "popstab/population_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "popstab/mc_engine.hpp"

namespace popstab::sim {

namespace {

using json = nlohmann::ordered_json;

std::vector<double> normalized(std::vector<double> props) {
  const double sum = std::accumulate(props.begin(), props.end(), 0.0);
  for (double& p : props) p /= sum;
  return props;
}

/// Exact distribution of the product of per-attribute bad ratios under
/// independent level draws. Values are kept sorted with equal values
/// merged, so clamped expectations reduce to prefix-sum lookups.
class ProductDistribution {
 public:
  ProductDistribution(const std::vector<AttributeConfig>& attributes,
                      const std::map<std::string, std::vector<double>>*
                          overrides) {
    std::vector<std::pair<double, double>> entries{{1.0, 1.0}};
    std::vector<std::pair<double, double>> next;
    for (const auto& attribute : attributes) {
      const std::vector<double>* props = &attribute.props;
      if (overrides) {
        const auto it = overrides->find(attribute.name);
        if (it != overrides->end()) props = &it->second;
      }
      next.clear();
      next.reserve(entries.size() * props->size());
      for (const auto& [value, prob] : entries) {
        for (std::size_t j = 0; j < props->size(); ++j) {
          const double p = (*props)[j];
          if (p <= 0.0) continue;
          next.emplace_back(value * attribute.bad_ratios[j], prob * p);
        }
      }
      std::sort(next.begin(), next.end());
      entries.clear();
      for (const auto& [value, prob] : next) {
        if (!entries.empty() && entries.back().first == value) {
          entries.back().second += prob;
        } else {
          entries.emplace_back(value, prob);
        }
      }
    }

    values_.reserve(entries.size());
    prefix_prob_.assign(entries.size() + 1, 0.0);
    prefix_value_prob_.assign(entries.size() + 1, 0.0);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      values_.push_back(entries[i].first);
      prefix_prob_[i + 1] = prefix_prob_[i] + entries[i].second;
      prefix_value_prob_[i + 1] =
          prefix_value_prob_[i] + entries[i].first * entries[i].second;
    }
  }

  double unclamped_mean() const { return prefix_value_prob_.back(); }

  /// E[ clamp(scale * value, kPdClamp, 1 - kPdClamp) ], exactly.
  double clamped_mean(double scale) const {
    const double lo_threshold = kPdClamp / scale;
    const double hi_threshold = (1.0 - kPdClamp) / scale;
    const auto lo_it = std::upper_bound(values_.begin(), values_.end(),
                                        lo_threshold);
    const auto hi_it = std::lower_bound(values_.begin(), values_.end(),
                                        hi_threshold);
    const auto lo = static_cast<std::size_t>(lo_it - values_.begin());
    const auto hi = static_cast<std::size_t>(hi_it - values_.begin());
    const double low_mass = prefix_prob_[lo];
    const double high_mass = prefix_prob_.back() - prefix_prob_[hi];
    const double mid_value_mass =
        prefix_value_prob_[hi] - prefix_value_prob_[lo];
    return kPdClamp * low_mass + scale * mid_value_mass +
           (1.0 - kPdClamp) * high_mass;
  }

 private:
  std::vector<double> values_;
  std::vector<double> prefix_prob_;
  std::vector<double> prefix_value_prob_;
};

double solve_scale(const ProductDistribution& dist, double target) {
  if (!(target > kPdClamp && target < 1.0 - kPdClamp)) {
    throw StabilityError(ErrorCode::CalibrationFailure,
                         "target bad rate outside the clamp bounds");
  }
  const double guess = target / dist.unclamped_mean();
  double lo = guess;
  double hi = guess;
  int expansions = 0;
  while (dist.clamped_mean(lo) > target && expansions++ < 200) lo *= 0.5;
  expansions = 0;
  while (dist.clamped_mean(hi) < target && expansions++ < 200) hi *= 2.0;
  if (dist.clamped_mean(lo) > target || dist.clamped_mean(hi) < target) {
    throw StabilityError(ErrorCode::CalibrationFailure,
                         "could not bracket the target bad rate");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-16 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (dist.clamped_mean(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double scale = 0.5 * (lo + hi);
  if (std::abs(dist.clamped_mean(scale) - target) > 1e-9) {
    throw StabilityError(ErrorCode::CalibrationFailure,
                         "bisection did not reach the target bad rate");
  }
  return scale;
}

std::vector<double> cumulative(const std::vector<double>& props) {
  std::vector<double> cum(props.size());
  double running = 0.0;
  for (std::size_t j = 0; j < props.size(); ++j) {
    running += props[j];
    cum[j] = running;
  }
  // Absorb float slack into the last populated level so a uniform draw
  // can never select a zero-proportion level.
  for (std::size_t j = props.size(); j-- > 0;) {
    cum[j] = 1.0;
    if (props[j] > 0.0) break;
  }
  return cum;
}

}  // namespace

AttributeConfig::AttributeConfig(std::string name_in,
                                 std::vector<std::string> levels_in,
                                 std::vector<double> props_in,
                                 std::vector<double> bad_ratios_in,
                                 bool ordinal_in)
    : name(std::move(name_in)),
      levels(std::move(levels_in)),
      props(std::move(props_in)),
      bad_ratios(std::move(bad_ratios_in)),
      ordinal(ordinal_in) {
  if (levels.size() != props.size() || levels.size() != bad_ratios.size()) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "attribute '" + name +
                             "': levels, proportions and bad ratios must "
                             "have equal length");
  }
  if (levels.size() < 2) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "attribute '" + name + "' needs at least 2 levels");
  }
  double sum = 0.0;
  for (double p : props) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw StabilityError(ErrorCode::InvalidProportions,
                           "attribute '" + name +
                               "': proportions must lie in [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProportionSumTolerance) {
    throw StabilityError(ErrorCode::InvalidProportions,
                         "attribute '" + name +
                             "': proportions must sum to 1");
  }
  for (double r : bad_ratios) {
    if (!(r > 0.0)) {
      throw StabilityError(ErrorCode::InvalidArgument,
                           "attribute '" + name +
                               "': bad ratios must be positive");
    }
  }
  std::set<std::string> seen(levels.begin(), levels.end());
  if (seen.size() != levels.size()) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "attribute '" + name + "': duplicate level labels");
  }
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Stable: return "stable";
    case ScenarioKind::StableOutcome: return "stable_outcome";
    case ScenarioKind::Unstable: return "unstable";
  }
  return "stable";
}

std::optional<ScenarioKind> scenario_from_string(const std::string& name) {
  if (name == "stable") return ScenarioKind::Stable;
  if (name == "stable_outcome" || name == "stable-outcome")
    return ScenarioKind::StableOutcome;
  if (name == "unstable") return ScenarioKind::Unstable;
  return std::nullopt;
}

const AttributeConfig* ScenarioConfig::find_attribute(
    const std::string& attr_name) const {
  for (const auto& attribute : base) {
    if (attribute.name == attr_name) return &attribute;
  }
  return nullptr;
}

void ScenarioConfig::validate() const {
  if (base.empty()) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "scenario has no attributes");
  }
  std::set<std::string> names;
  for (const auto& attribute : base) {
    if (!names.insert(attribute.name).second) {
      throw StabilityError(ErrorCode::StructuralMismatch,
                           "duplicate attribute '" + attribute.name + "'");
    }
  }
  for (const auto& [attr_name, props] : review_overrides) {
    const AttributeConfig* attribute = find_attribute(attr_name);
    if (attribute == nullptr) {
      throw StabilityError(ErrorCode::UnknownAttribute,
                           "override references unknown attribute '" +
                               attr_name + "'");
    }
    if (props.size() != attribute->levels.size()) {
      throw StabilityError(ErrorCode::StructuralMismatch,
                           "override for '" + attr_name +
                               "' changes the level count");
    }
    double sum = 0.0;
    for (double p : props) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw StabilityError(ErrorCode::InvalidProportions,
                             "override for '" + attr_name +
                                 "': proportions must lie in [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProportionSumTolerance) {
      throw StabilityError(ErrorCode::InvalidProportions,
                           "override for '" + attr_name +
                               "': proportions must sum to 1");
    }
  }
  if (!(target_bad_rate > 0.0 && target_bad_rate < 1.0)) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "target bad rate must lie in (0, 1)");
  }
  if (population_size < 1) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "population size must be positive");
  }
}

std::vector<ScenarioConfig> builtin_scenarios() {
  std::vector<AttributeConfig> base;
  base.emplace_back("Gender", std::vector<std::string>{"Female", "Male"},
                    std::vector<double>{0.60, 0.40},
                    std::vector<double>{1.0, 3.0}, true);
  base.emplace_back(
      "Age",
      std::vector<std::string>{"18-21", "22-25", "26-30", "31-45", "46-57",
                               "58-63", "64-75"},
      std::vector<double>{0.05, 0.07, 0.09, 0.26, 0.21, 0.11, 0.21},
      std::vector<double>{1.00, 0.85, 0.78, 0.66, 0.50, 0.43, 0.31}, true);
  base.emplace_back(
      "NumEnq", std::vector<std::string>{"0", "1", "2", "3", "4", "5+"},
      std::vector<double>{0.30, 0.25, 0.20, 0.15, 0.05, 0.05},
      std::vector<double>{1.0, 1.3, 1.8, 1.9, 2.1, 2.7}, true);
  base.emplace_back("ExistCust",
                    std::vector<std::string>{"Existing", "New"},
                    std::vector<double>{0.80, 0.20},
                    std::vector<double>{1.0, 2.7}, true);
  base.emplace_back("CCother",
                    std::vector<std::string>{"0", "1", "2", "3+"},
                    std::vector<double>{0.50, 0.30, 0.15, 0.05},
                    std::vector<double>{1.0, 1.2, 1.7, 2.5}, true);
  base.emplace_back(
      "OutBal",
      std::vector<std::string>{"0-5000", "5000-10000", "10000-25000",
                               "25000-100000", ">100000"},
      std::vector<double>{0.244, 0.256, 0.320, 0.169, 0.011},
      std::vector<double>{1.0, 1.2, 2.0, 2.1, 0.8}, true);
  base.emplace_back(
      "Prov",
      std::vector<std::string>{"Gauteng", "WesternCape", "KwaZuluNatal",
                               "Mpumalanga", "NorthWest", "Limpopo",
                               "EasternCape", "NorthernCape", "FreeState"},
      std::vector<double>{0.40, 0.30, 0.07, 0.05, 0.05, 0.04, 0.04, 0.03,
                          0.02},
      std::vector<double>{1.0, 0.7, 1.8, 1.5, 3.0, 2.5, 2.0, 4.0, 1.2},
      false);
  base.emplace_back(
      "AppMethod",
      std::vector<std::string>{"Branch", "Online", "Phone", "MarketingCall"},
      std::vector<double>{0.30, 0.40, 0.15, 0.15},
      std::vector<double>{1.0, 0.5, 1.5, 0.4}, false);
  base.emplace_back(
      "Income",
      std::vector<std::string>{"0-5000", "5000-11000", "11000-20000",
                               "20000-30000", "30000-70000", ">70000"},
      std::vector<double>{0.032, 0.156, 0.204, 0.218, 0.240, 0.150},
      std::vector<double>{3.0, 2.5, 2.0, 1.4, 1.2, 1.0}, true);
  // The published proportions for this attribute add up to 100.1%; they
  // are rescaled so the distribution is proper. The top bucket is kept
  // at exactly zero mass.
  base.emplace_back(
      "RecDef",
      std::vector<std::string>{"0-1000", "1000-3000", "3000-5000",
                               "5000-30000", "30000-1000000", ">1000000"},
      normalized({0.600, 0.011, 0.021, 0.189, 0.180, 0.000}),
      std::vector<double>{1.0, 1.1, 2.0, 2.5, 3.0, 3.3}, true);

  ScenarioConfig stable;
  stable.name = to_string(ScenarioKind::Stable);
  stable.base = base;

  ScenarioConfig stable_outcome;
  stable_outcome.name = to_string(ScenarioKind::StableOutcome);
  stable_outcome.base = base;
  stable_outcome.review_overrides["NumEnq"] = {0.40, 0.25, 0.10,
                                               0.15, 0.05, 0.05};
  stable_outcome.review_overrides["CCother"] = {0.30, 0.50, 0.15, 0.05};

  ScenarioConfig unstable;
  unstable.name = to_string(ScenarioKind::Unstable);
  unstable.base = base;
  unstable.review_overrides["Gender"] = {0.55, 0.45};
  unstable.review_overrides["NumEnq"] = {0.25, 0.30, 0.20, 0.15, 0.05, 0.05};
  unstable.review_overrides["ExistCust"] = {0.75, 0.25};
  unstable.review_overrides["CCother"] = {0.45, 0.35, 0.15, 0.05};
  unstable.review_overrides["Prov"] = {0.35, 0.35, 0.07, 0.05, 0.05,
                                       0.04, 0.04, 0.03, 0.02};
  unstable.review_overrides["AppMethod"] = {0.25, 0.45, 0.15, 0.15};

  for (auto* scenario : {&stable, &stable_outcome, &unstable}) {
    scenario->validate();
  }
  return {stable, stable_outcome, unstable};
}

double SimulatedPopulation::default_rate() const {
  if (defaulted.empty()) return 0.0;
  const double total =
      std::accumulate(defaulted.begin(), defaulted.end(), 0.0);
  return total / static_cast<double>(defaulted.size());
}

std::size_t SimulatedPopulation::attribute_index(
    const std::string& name) const {
  for (std::size_t a = 0; a < attributes.size(); ++a) {
    if (attributes[a].name == name) return a;
  }
  throw StabilityError(ErrorCode::UnknownAttribute,
                       "no attribute named '" + name + "'");
}

Calibration calibrate(const ScenarioConfig& config) {
  config.validate();
  ProductDistribution dist(config.base, nullptr);
  Calibration result;
  result.scale = solve_scale(dist, config.target_bad_rate);
  result.dev_mean_pd = dist.clamped_mean(result.scale);
  return result;
}

SimulatedPopulation simulate(const ScenarioConfig& config,
                             PopulationRole role, std::uint64_t seed) {
  config.validate();
  const Calibration cal = calibrate(config);
  const auto n = static_cast<std::size_t>(config.population_size);
  const std::size_t n_attrs = config.base.size();

  std::vector<std::vector<double>> cumulatives(n_attrs);
  for (std::size_t a = 0; a < n_attrs; ++a) {
    const std::vector<double>* props = &config.base[a].props;
    if (role == PopulationRole::Review) {
      const auto it = config.review_overrides.find(config.base[a].name);
      if (it != config.review_overrides.end()) props = &it->second;
    }
    cumulatives[a] = cumulative(*props);
  }

  SimulatedPopulation pop;
  pop.seed = seed;
  pop.role = role;
  pop.attributes.reserve(n_attrs);
  for (const auto& attribute : config.base) {
    pop.attributes.push_back(
        {attribute.name, attribute.levels, attribute.ordinal});
  }
  pop.level_index.assign(n_attrs, std::vector<std::uint8_t>(n));
  pop.true_pd.resize(n);
  pop.defaulted.resize(n);

  const std::uint64_t stream =
      role == PopulationRole::Development ? 0u : 1u;
  std::mt19937_64 rng(mc::stream_seed(seed, stream));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t c = 0; c < n; ++c) {
    double ratio_product = 1.0;
    for (std::size_t a = 0; a < n_attrs; ++a) {
      const auto& cum = cumulatives[a];
      const double u = unit(rng);
      const auto it = std::upper_bound(cum.begin(), cum.end(), u);
      const auto level = static_cast<std::size_t>(it - cum.begin());
      pop.level_index[a][c] = static_cast<std::uint8_t>(level);
      ratio_product *= config.base[a].bad_ratios[level];
    }
    const double pd = std::clamp(cal.scale * ratio_product, kPdClamp,
                                 1.0 - kPdClamp);
    pop.true_pd[c] = pd;
    pop.defaulted[c] = unit(rng) < pd ? 1 : 0;
  }
  return pop;
}

SnapshotPair snapshot(const SimulatedPopulation& development,
                      const SimulatedPopulation& review,
                      const std::string& attribute) {
  const std::size_t dev_idx = development.attribute_index(attribute);
  const std::size_t rev_idx = review.attribute_index(attribute);
  const auto& meta = development.attributes[dev_idx];
  if (review.attributes[rev_idx].levels != meta.levels) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "attribute '" + attribute +
                             "' has different levels in the two populations");
  }

  auto proportions = [&](const SimulatedPopulation& pop, std::size_t idx) {
    std::vector<double> counts(meta.levels.size(), 0.0);
    for (std::uint8_t level : pop.level_index[idx]) {
      counts[level] += 1.0;
    }
    std::vector<double> props(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) {
      props[j] = counts[j] / static_cast<double>(pop.size());
    }
    return props;
  };

  return SnapshotPair(
      ProportionVector(meta.levels, proportions(development, dev_idx),
                       meta.ordinal),
      ProportionVector(meta.levels, proportions(review, rev_idx),
                       meta.ordinal),
      static_cast<long>(development.size()),
      static_cast<long>(review.size()));
}

std::pair<double, double> mean_pd_shift(const ScenarioConfig& config) {
  config.validate();
  ProductDistribution dev_dist(config.base, nullptr);
  const double scale = solve_scale(dev_dist, config.target_bad_rate);
  const double dev_mean = dev_dist.clamped_mean(scale);
  if (config.review_overrides.empty()) {
    return {dev_mean, dev_mean};
  }
  ProductDistribution review_dist(config.base, &config.review_overrides);
  return {dev_mean, review_dist.clamped_mean(scale)};
}

std::vector<double> level_conditional_pds(const ScenarioConfig& config,
                                          const std::string& attribute) {
  config.validate();
  const AttributeConfig* attr = config.find_attribute(attribute);
  if (attr == nullptr) {
    throw StabilityError(ErrorCode::UnknownAttribute, attribute);
  }
  ProductDistribution dev_dist(config.base, nullptr);
  const double scale = solve_scale(dev_dist, config.target_bad_rate);

  std::vector<double> pds(attr->levels.size());
  for (std::size_t j = 0; j < attr->levels.size(); ++j) {
    std::map<std::string, std::vector<double>> condition;
    std::vector<double> one_hot(attr->levels.size(), 0.0);
    one_hot[j] = 1.0;
    condition[attribute] = one_hot;
    ProductDistribution conditional(config.base, &condition);
    pds[j] = conditional.clamped_mean(scale);
  }
  return pds;
}

std::string scenario_to_json(const ScenarioConfig& config) {
  json doc;
  doc["name"] = config.name;
  doc["target_bad_rate"] = config.target_bad_rate;
  doc["population_size"] = config.population_size;
  doc["attributes"] = json::array();
  for (const auto& attribute : config.base) {
    json entry;
    entry["name"] = attribute.name;
    entry["ordinal"] = attribute.ordinal;
    entry["levels"] = attribute.levels;
    entry["proportions"] = attribute.props;
    entry["bad_ratios"] = attribute.bad_ratios;
    doc["attributes"].push_back(entry);
  }
  doc["review_overrides"] = json::object();
  for (const auto& [name, props] : config.review_overrides) {
    doc["review_overrides"][name] = props;
  }
  return doc.dump(2);
}

ScenarioConfig scenario_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& error) {
    throw StabilityError(ErrorCode::ParseError, error.what());
  }
  ScenarioConfig config;
  config.name = doc.value("name", "custom");
  config.target_bad_rate = doc.value("target_bad_rate", 0.10);
  config.population_size = doc.value("population_size", 10000L);
  for (const auto& entry : doc.at("attributes")) {
    config.base.emplace_back(
        entry.at("name").get<std::string>(),
        entry.at("levels").get<std::vector<std::string>>(),
        entry.at("proportions").get<std::vector<double>>(),
        entry.at("bad_ratios").get<std::vector<double>>(),
        entry.value("ordinal", false));
  }
  if (doc.contains("review_overrides")) {
    for (const auto& [name, props] : doc["review_overrides"].items()) {
      config.review_overrides[name] = props.get<std::vector<double>>();
    }
  }
  config.validate();
  return config;
}

}  // namespace popstab::sim
