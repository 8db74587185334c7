#include "popstab/types.hpp"

#include <algorithm>
#include <unordered_set>

namespace popstab {

std::string to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::StructuralMismatch: return "StructuralMismatch";
    case ErrorCode::InvalidProportions: return "InvalidProportions";
    case ErrorCode::ZeroBaselineLevel: return "ZeroBaselineLevel";
    case ErrorCode::NominalAttributeKs: return "NominalAttributeKS";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DegenerateLevel: return "DegenerateLevel";
    case ErrorCode::UnknownLevel: return "UnknownLevel";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::CalibrationFailure: return "CalibrationFailure";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::Psi: return "psi";
    case Metric::Dpv: return "dpv";
    case Metric::EffectSize: return "effect_size";
    case Metric::Overlapping: return "overlapping";
    case Metric::Ks: return "ks";
    case Metric::Pai: return "pai";
  }
  return "unknown";
}

std::string to_string(Band band) {
  switch (band) {
    case Band::NoChange: return "NoChange";
    case Band::SmallChange: return "SmallChange";
    case Band::SubstantialChange: return "SubstantialChange";
    case Band::NotClassified: return "NotClassified";
  }
  return "NotClassified";
}

std::string to_string(Diagnostic diagnostic) {
  switch (diagnostic) {
    case Diagnostic::ZeroBaselineLevel: return "ZeroBaselineLevel";
    case Diagnostic::NominalAttributeKs: return "NominalAttributeKS";
    case Diagnostic::EmptyLevelDropped: return "EmptyLevelDropped";
    case Diagnostic::SeparationSuspected: return "SeparationSuspected";
  }
  return "Unknown";
}

ProportionVector::ProportionVector(std::vector<std::string> levels_in,
                                   std::vector<double> props_in,
                                   bool ordinal_in)
    : levels(std::move(levels_in)),
      props(std::move(props_in)),
      ordinal(ordinal_in) {
  if (levels.size() != props.size()) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "level and proportion lists differ in length");
  }
  if (props.size() < 2) {
    throw StabilityError(ErrorCode::InvalidProportions,
                         "an attribute needs at least two levels");
  }
  double sum = 0.0;
  for (double p : props) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw StabilityError(ErrorCode::InvalidProportions,
                           "proportions must lie in [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProportionSumTolerance) {
    throw StabilityError(ErrorCode::InvalidProportions,
                         "proportions must sum to 1, got " +
                             std::to_string(sum));
  }
  std::unordered_set<std::string> seen;
  for (const auto& level : levels) {
    if (!seen.insert(level).second) {
      throw StabilityError(ErrorCode::StructuralMismatch,
                           "duplicate level label: " + level);
    }
  }
}

SnapshotPair::SnapshotPair(ProportionVector development_in,
                           ProportionVector review_in,
                           std::optional<long> dev_count_in,
                           std::optional<long> review_count_in)
    : development(std::move(development_in)),
      review(std::move(review_in)),
      dev_count(dev_count_in),
      review_count(review_count_in) {
  if (development.levels != review.levels) {
    throw StabilityError(
        ErrorCode::StructuralMismatch,
        "development and review must list identical levels in order");
  }
  if (development.ordinal != review.ordinal) {
    throw StabilityError(ErrorCode::StructuralMismatch,
                         "ordinal flag differs between the two sides");
  }
  for (auto count : {dev_count, review_count}) {
    if (count && *count <= 0) {
      throw StabilityError(ErrorCode::InvalidArgument,
                           "sample counts must be positive");
    }
  }
}

RawSamplePair::RawSamplePair(std::vector<double> x_in,
                             std::vector<double> y_in)
    : x(std::move(x_in)), y(std::move(y_in)) {
  if (x.empty() || y.empty()) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "both samples must be non-empty");
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  if (ss <= 0.0) {
    throw StabilityError(ErrorCode::ZeroVariance,
                         "development sample has zero variance");
  }
}

bool MetricOutcome::has_flag(Diagnostic d) const {
  return std::find(flags.begin(), flags.end(), d) != flags.end();
}

}  // namespace popstab
