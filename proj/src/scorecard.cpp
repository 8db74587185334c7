#include "popstab/scorecard.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

namespace popstab::scorecard {

namespace {

using json = nlohmann::ordered_json;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::MatrixXd design_matrix(
    const std::vector<std::vector<double>>& features, std::size_t n) {
  const std::size_t p = features.empty() ? 0 : features.front().size();
  Eigen::MatrixXd design(n, p + 1);
  for (std::size_t i = 0; i < n; ++i) {
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    if (p > 0 && features[i].size() != p) {
      throw StabilityError(ErrorCode::StructuralMismatch,
                           "feature rows differ in length");
    }
    for (std::size_t j = 0; j < p; ++j) {
      design(static_cast<Eigen::Index>(i),
             static_cast<Eigen::Index>(j + 1)) = features[i][j];
    }
  }
  return design;
}

double bernoulli_log_likelihood(const Eigen::MatrixXd& design,
                                const Eigen::VectorXd& outcomes,
                                const Eigen::VectorXd& params) {
  // Numerically stable form: Σ y·z − log(1 + e^z).
  const Eigen::VectorXd z = design * params;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double zi = z(i);
    const double log1pe =
        zi > 0.0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
    ll += outcomes(i) * zi - log1pe;
  }
  return ll;
}

}  // namespace

GroupedCounts::GroupedCounts(std::vector<std::string> levels_in,
                             std::vector<long> observations_in,
                             std::vector<long> defaults_in)
    : levels(std::move(levels_in)),
      observations(std::move(observations_in)),
      defaults(std::move(defaults_in)) {
  if (levels.size() != observations.size() ||
      levels.size() != defaults.size()) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "levels, observations and defaults differ in size");
  }
  if (levels.empty()) {
    throw StabilityError(ErrorCode::InvalidArgument, "no levels");
  }
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (observations[j] < 0 || defaults[j] < 0 ||
        defaults[j] > observations[j]) {
      throw StabilityError(ErrorCode::InvalidArgument,
                           "need 0 <= defaults <= observations at level '" +
                               levels[j] + "'");
    }
  }
  const long n = total_observations();
  const long d = total_defaults();
  if (n <= 0 || d <= 0 || d >= n) {
    throw StabilityError(
        ErrorCode::InvalidArgument,
        "totals must satisfy 0 < defaults < observations");
  }
}

long GroupedCounts::total_observations() const {
  return std::accumulate(observations.begin(), observations.end(), 0L);
}

long GroupedCounts::total_defaults() const {
  return std::accumulate(defaults.begin(), defaults.end(), 0L);
}

WoeTable woe(const GroupedCounts& counts, double smoothing) {
  if (smoothing < 0.0) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "smoothing must be non-negative");
  }
  const double total_defaults =
      static_cast<double>(counts.total_defaults()) +
      smoothing * static_cast<double>(counts.levels.size());
  const double total_goods =
      static_cast<double>(counts.total_observations() -
                          counts.total_defaults()) +
      smoothing * static_cast<double>(counts.levels.size());

  WoeTable table;
  table.levels = counts.levels;
  table.woe.resize(counts.levels.size());
  for (std::size_t j = 0; j < counts.levels.size(); ++j) {
    const double bads = static_cast<double>(counts.defaults[j]) + smoothing;
    const double goods =
        static_cast<double>(counts.observations[j] - counts.defaults[j]) +
        smoothing;
    if (bads <= 0.0 || goods <= 0.0) {
      throw StabilityError(ErrorCode::DegenerateLevel,
                           "level '" + counts.levels[j] +
                               "' has no defaults or no non-defaults");
    }
    table.woe[j] = std::log((total_defaults * goods) / (bads * total_goods));
  }
  return table;
}

std::string to_string(IvBand band) {
  switch (band) {
    case IvBand::Unpredictive: return "unpredictive";
    case IvBand::Weak: return "weak";
    case IvBand::Medium: return "medium";
    case IvBand::Strong: return "strong";
  }
  return "unpredictive";
}

IvResult iv(const GroupedCounts& counts, double smoothing) {
  const WoeTable table = woe(counts, smoothing);
  const double total_defaults =
      static_cast<double>(counts.total_defaults()) +
      smoothing * static_cast<double>(counts.levels.size());
  const double total_goods =
      static_cast<double>(counts.total_observations() -
                          counts.total_defaults()) +
      smoothing * static_cast<double>(counts.levels.size());

  double value = 0.0;
  for (std::size_t j = 0; j < counts.levels.size(); ++j) {
    const double bads = static_cast<double>(counts.defaults[j]) + smoothing;
    const double goods =
        static_cast<double>(counts.observations[j] - counts.defaults[j]) +
        smoothing;
    value += (goods / total_goods - bads / total_defaults) * table.woe[j];
  }

  IvResult result;
  result.value = value;
  if (value < 0.02) {
    result.band = IvBand::Unpredictive;
  } else if (value < 0.1) {
    result.band = IvBand::Weak;
  } else if (value < 0.3) {
    result.band = IvBand::Medium;
  } else {
    result.band = IvBand::Strong;
  }
  return result;
}

double log_likelihood(const std::vector<std::vector<double>>& features,
                      const std::vector<int>& outcomes,
                      const std::vector<double>& params) {
  const std::size_t n = outcomes.size();
  Eigen::MatrixXd design = design_matrix(features, n);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) =
      static_cast<double>(outcomes[i]);
  Eigen::VectorXd beta =
      Eigen::Map<const Eigen::VectorXd>(params.data(),
                                        static_cast<Eigen::Index>(
                                            params.size()));
  if (beta.size() != design.cols()) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "parameter vector length mismatch");
  }
  return bernoulli_log_likelihood(design, y, beta);
}

std::vector<double> log_likelihood_gradient(
    const std::vector<std::vector<double>>& features,
    const std::vector<int>& outcomes, const std::vector<double>& params) {
  const std::size_t n = outcomes.size();
  Eigen::MatrixXd design = design_matrix(features, n);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) =
      static_cast<double>(outcomes[i]);
  Eigen::VectorXd beta =
      Eigen::Map<const Eigen::VectorXd>(params.data(),
                                        static_cast<Eigen::Index>(
                                            params.size()));
  if (beta.size() != design.cols()) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "parameter vector length mismatch");
  }
  Eigen::VectorXd mu = (design * beta).unaryExpr(
      [](double z) { return sigmoid(z); });
  Eigen::VectorXd grad = design.transpose() * (y - mu);
  return std::vector<double>(grad.data(), grad.data() + grad.size());
}

LogisticFit fit_logistic(const std::vector<std::vector<double>>& features,
                         const std::vector<int>& outcomes,
                         const LogisticFitOptions& options) {
  const std::size_t n = outcomes.size();
  if (n == 0 || (!features.empty() && features.size() != n)) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "outcomes and feature rows must match");
  }
  long positives = 0;
  for (int y : outcomes) {
    if (y != 0 && y != 1) {
      throw StabilityError(ErrorCode::InvalidArgument,
                           "outcomes must be 0 or 1");
    }
    positives += y;
  }
  if (positives == 0 || positives == static_cast<long>(n)) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "need at least one default and one non-default");
  }

  Eigen::MatrixXd design = design_matrix(features, n);
  const Eigen::Index p = design.cols();

  // Numerical full-column-rank check on the design.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    throw StabilityError(ErrorCode::RankDeficient,
                         "feature matrix is numerically rank deficient");
  }

  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) =
      static_cast<double>(outcomes[i]);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double ll = bernoulli_log_likelihood(design, y, beta);

  LogisticFit fit;
  fit.log_likelihood_trace.push_back(ll);

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    Eigen::VectorXd mu = (design * beta).unaryExpr(
        [](double z) { return sigmoid(z); });
    Eigen::VectorXd grad = design.transpose() * (y - mu);
    fit.final_gradient_norm = grad.cwiseAbs().maxCoeff();
    fit.iterations = iter - 1;
    if (fit.final_gradient_norm < options.gradient_tolerance) {
      fit.converged = true;
      break;
    }

    Eigen::VectorXd weights = mu.array() * (1.0 - mu.array());
    Eigen::MatrixXd hessian =
        design.transpose() * weights.asDiagonal() * design;
    Eigen::VectorXd direction = hessian.ldlt().solve(grad);

    // Step halving keeps the log-likelihood non-decreasing up to the
    // evaluation noise of the sum itself.
    const double slack = 1e-12 * (1.0 + std::abs(ll));
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving) {
      Eigen::VectorXd candidate = beta + step * direction;
      const double candidate_ll =
          bernoulli_log_likelihood(design, y, candidate);
      if (candidate_ll >= ll - slack) {
        beta = candidate;
        ll = candidate_ll;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    fit.log_likelihood_trace.push_back(ll);
    if (!accepted) break;  // stuck at numerical precision
  }

  if (!fit.converged) {
    Eigen::VectorXd mu = (design * beta).unaryExpr(
        [](double z) { return sigmoid(z); });
    fit.final_gradient_norm =
        (design.transpose() * (y - mu)).cwiseAbs().maxCoeff();
    if (fit.final_gradient_norm >= options.gradient_tolerance) {
      throw StabilityError(
          ErrorCode::NonConvergence,
          "no convergence after " + std::to_string(options.max_iterations) +
              " iterations; gradient max-norm " +
              std::to_string(fit.final_gradient_norm));
    }
    fit.converged = true;
  }

  fit.intercept = beta(0);
  fit.coefficients.assign(beta.data() + 1, beta.data() + p);
  fit.separation_suspected =
      beta.cwiseAbs().maxCoeff() > options.separation_cap;
  return fit;
}

const WoeTable* ScorecardModel::find_attribute(
    const std::string& name) const {
  for (const auto& [attr_name, table] : attributes) {
    if (attr_name == name) return &table;
  }
  return nullptr;
}

double predict_pd(const ScorecardModel& model,
                  const std::map<std::string, std::string>& levels) {
  if (model.coefficients.size() != model.attributes.size()) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "one coefficient per attribute is required");
  }
  double score = model.intercept;
  for (std::size_t a = 0; a < model.attributes.size(); ++a) {
    const auto& [name, table] = model.attributes[a];
    const auto it = levels.find(name);
    if (it == levels.end()) {
      throw StabilityError(ErrorCode::UnknownAttribute,
                           "no level supplied for attribute '" + name + "'");
    }
    const auto level_it =
        std::find(table.levels.begin(), table.levels.end(), it->second);
    if (level_it == table.levels.end()) {
      throw StabilityError(ErrorCode::UnknownLevel,
                           "level '" + it->second +
                               "' is not in the model for attribute '" +
                               name + "'");
    }
    const auto idx =
        static_cast<std::size_t>(level_it - table.levels.begin());
    score += model.coefficients[a] * table.woe[idx];
  }
  return sigmoid(score);
}

std::string model_to_json(const ScorecardModel& model) {
  json doc;
  doc["model"] = "logistic-woe";
  doc["schema_version"] = 1;
  doc["intercept"] = model.intercept;
  doc["attributes"] = json::array();
  for (std::size_t a = 0; a < model.attributes.size(); ++a) {
    const auto& [name, table] = model.attributes[a];
    json entry;
    entry["name"] = name;
    entry["coefficient"] = model.coefficients[a];
    json woe_map = json::object();
    for (std::size_t j = 0; j < table.levels.size(); ++j) {
      woe_map[table.levels[j]] = table.woe[j];
    }
    entry["woe"] = woe_map;
    doc["attributes"].push_back(entry);
  }
  doc["separation_suspected"] = model.separation_suspected;
  return doc.dump(2);
}

ScorecardModel model_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& error) {
    throw StabilityError(ErrorCode::ParseError, error.what());
  }
  if (!doc.contains("model") || doc["model"] != "logistic-woe") {
    throw StabilityError(ErrorCode::ParseError,
                         "not a logistic-woe model document");
  }
  ScorecardModel model;
  model.intercept = doc.at("intercept").get<double>();
  model.separation_suspected =
      doc.value("separation_suspected", false);
  for (const auto& entry : doc.at("attributes")) {
    WoeTable table;
    for (const auto& [level, value] : entry.at("woe").items()) {
      table.levels.push_back(level);
      table.woe.push_back(value.get<double>());
    }
    model.attributes.emplace_back(entry.at("name").get<std::string>(),
                                  std::move(table));
    model.coefficients.push_back(entry.at("coefficient").get<double>());
  }
  return model;
}

PdGrouping pd_groups(const std::vector<double>& dev_pds,
                     const std::vector<double>& review_pds, int g) {
  if (g < 2) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "need at least two groups");
  }
  if (dev_pds.size() < static_cast<std::size_t>(g)) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "development sample smaller than group count");
  }
  const std::set<double> distinct(dev_pds.begin(), dev_pds.end());
  if (distinct.size() < static_cast<std::size_t>(g)) {
    throw StabilityError(
        ErrorCode::InvalidArgument,
        "only " + std::to_string(distinct.size()) +
            " distinct PD values; at most that many groups are achievable");
  }

  std::vector<double> sorted = dev_pds;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  // Cut point i is the first development PD of group i+1; a value equal
  // to a cut belongs to the upper group.
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(g) - 1);
  for (int i = 1; i < g; ++i) {
    cuts.push_back(
        sorted[static_cast<std::size_t>(i) * n / static_cast<std::size_t>(g)]);
  }
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i] <= cuts[i - 1]) {
      // Heavy ties collapse neighbouring quantiles.
      std::set<double> unique_cuts(cuts.begin(), cuts.end());
      throw StabilityError(
          ErrorCode::InvalidArgument,
          "tied PDs collapse the requested quantiles; at most " +
              std::to_string(unique_cuts.size() + 1) +
              " groups are achievable");
    }
  }

  auto bucket_proportions = [&](const std::vector<double>& pds) {
    std::vector<double> counts(static_cast<std::size_t>(g), 0.0);
    for (double pd : pds) {
      // Group index = number of cuts <= pd, so a PD equal to a cut
      // belongs to the group that starts at that cut. Values outside
      // the development range land in the first/last group.
      const auto upper = std::upper_bound(cuts.begin(), cuts.end(), pd);
      counts[static_cast<std::size_t>(upper - cuts.begin())] += 1.0;
    }
    std::vector<double> props(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      props[i] = counts[i] / static_cast<double>(pds.size());
    }
    return props;
  };

  std::vector<std::string> group_labels;
  group_labels.reserve(static_cast<std::size_t>(g));
  for (int i = 1; i <= g; ++i) {
    group_labels.push_back("G" + std::to_string(i));
  }

  PdGrouping grouping;
  grouping.cut_points = cuts;
  grouping.group_proportions_dev =
      ProportionVector(group_labels, bucket_proportions(dev_pds), true);
  grouping.group_proportions_review =
      ProportionVector(group_labels, bucket_proportions(review_pds), true);
  return grouping;
}

}  // namespace popstab::scorecard
