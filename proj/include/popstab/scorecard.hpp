#pragma once

/// @file scorecard.hpp
/// Minimal scorecard pipeline: attribute grouping counts, weight of
/// evidence, information value, a logistic fit on WOE features, PD
/// prediction and equal-frequency PD groups.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "popstab/types.hpp"

namespace popstab::scorecard {

/// Observation and default counts per level of one attribute.
struct GroupedCounts {
  std::vector<std::string> levels;
  std::vector<long> observations;  // n_j
  std::vector<long> defaults;      // d_j

  GroupedCounts() = default;
  GroupedCounts(std::vector<std::string> levels_in,
                std::vector<long> observations_in,
                std::vector<long> defaults_in);

  long total_observations() const;
  long total_defaults() const;
};

struct WoeTable {
  std::vector<std::string> levels;
  std::vector<double> woe;  // log-odds units
};

/// WOE_j = ln( D·(n_j − D_j) / (D_j·(n − D)) ).
///
/// Levels with no defaults or no non-defaults have no finite WOE and
/// raise DegenerateLevel; `smoothing` > 0 adds the constant to both the
/// default and non-default counts of every level (exploratory use only,
/// default off).
WoeTable woe(const GroupedCounts& counts, double smoothing = 0.0);

enum class IvBand { Unpredictive, Weak, Medium, Strong };
std::string to_string(IvBand band);

struct IvResult {
  double value = 0.0;
  IvBand band = IvBand::Unpredictive;
};

/// Information value with the usual rule-of-thumb bands:
/// <0.02 unpredictive, [0.02, 0.1) weak, [0.1, 0.3) medium, ≥0.3 strong.
IvResult iv(const GroupedCounts& counts, double smoothing = 0.0);

struct LogisticFitOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-6;  // max-norm at convergence
  // Coefficients beyond this magnitude flag likely separation; WOE
  // features keep honest coefficients within a few units.
  double separation_cap = 10.0;
};

struct LogisticFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
  bool converged = false;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  bool separation_suspected = false;
  std::vector<double> log_likelihood_trace;  // one entry per iteration
};

/// Maximum-likelihood logistic regression via damped Newton iterations
/// with step halving. Deterministic: coefficients start at zero and the
/// iteration schedule is fixed. `features` is row-major (one row per
/// customer, intercept added internally); an empty feature list fits an
/// intercept-only model.
LogisticFit fit_logistic(const std::vector<std::vector<double>>& features,
                         const std::vector<int>& outcomes,
                         const LogisticFitOptions& options = {});

/// Log-likelihood and its analytic gradient for externally chosen
/// parameters (intercept first). Exposed for verification.
double log_likelihood(const std::vector<std::vector<double>>& features,
                      const std::vector<int>& outcomes,
                      const std::vector<double>& params);
std::vector<double> log_likelihood_gradient(
    const std::vector<std::vector<double>>& features,
    const std::vector<int>& outcomes, const std::vector<double>& params);

/// A fitted scorecard: per-attribute WOE tables plus the logistic
/// coefficients (one per attribute) and intercept.
struct ScorecardModel {
  std::vector<std::pair<std::string, WoeTable>> attributes;
  std::vector<double> coefficients;
  double intercept = 0.0;
  bool separation_suspected = false;

  const WoeTable* find_attribute(const std::string& name) const;
};

/// Inverse-logit of intercept + Σ coefficient·WOE(level). The level of
/// every model attribute must be present in its WOE table.
double predict_pd(const ScorecardModel& model,
                  const std::map<std::string, std::string>& levels);

/// JSON export/import of a fitted model (documented schema: attribute
/// names, level→WOE maps, coefficients, intercept).
std::string model_to_json(const ScorecardModel& model);
ScorecardModel model_from_json(const std::string& json_text);

struct PdGrouping {
  std::vector<double> cut_points;  // ascending, in (0, 1)
  ProportionVector group_proportions_dev;
  ProportionVector group_proportions_review;
};

/// Equal-frequency PD groups: cut points are the development sample's
/// g-quantiles; both samples are bucketed by them. Review PDs outside
/// the development range fall into the first/last group.
PdGrouping pd_groups(const std::vector<double>& dev_pds,
                     const std::vector<double>& review_pds, int g);

}  // namespace popstab::scorecard
