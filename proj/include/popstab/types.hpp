#pragma once

/// @file types.hpp
/// Core value types shared by the stability metrics, the Monte-Carlo
/// engine and the reporting layer. All types are immutable after
/// construction and safe to share across threads.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace popstab {

enum class ErrorCode {
  InvalidArgument,
  StructuralMismatch,
  InvalidProportions,
  ZeroBaselineLevel,
  NominalAttributeKs,
  ZeroVariance,
  DegenerateLevel,
  UnknownLevel,
  UnknownAttribute,
  NonConvergence,
  RankDeficient,
  CalibrationFailure,
  UnknownScenario,
  ParseError,
};

std::string to_string(ErrorCode code);

/// Exception carrying a machine-readable code alongside the message.
/// The reporting layer maps codes to per-metric error cells; the CLI
/// maps them to exit status 1.
class StabilityError : public std::runtime_error {
 public:
  StabilityError(ErrorCode code, const std::string& message)
      : std::runtime_error(to_string(code) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

enum class Metric { Psi, Dpv, EffectSize, Overlapping, Ks, Pai };

enum class Band { NoChange, SmallChange, SubstantialChange, NotClassified };

/// Diagnostic codes attached to a metric outcome.
enum class Diagnostic {
  ZeroBaselineLevel,   // a level is empty on exactly one side
  NominalAttributeKs,  // KS requested on an unordered attribute
  EmptyLevelDropped,   // level empty on both sides removed before computing
  SeparationSuspected, // logistic fit hit the coefficient cap
};

std::string to_string(Metric metric);
std::string to_string(Band band);
std::string to_string(Diagnostic diagnostic);

/// Discrete distribution of one attribute: level labels plus the
/// fraction of the population observed (or specified) at each level.
struct ProportionVector {
  std::vector<std::string> levels;
  std::vector<double> props;
  bool ordinal = false;

  ProportionVector() = default;
  ProportionVector(std::vector<std::string> levels_in,
                   std::vector<double> props_in, bool ordinal_in);

  std::size_t size() const { return props.size(); }
};

/// Tolerance used when checking that proportions sum to one.
inline constexpr double kProportionSumTolerance = 1e-9;

/// Paired development/review view of one attribute. Both sides must
/// carry the same levels in the same order. Sample sizes are optional;
/// they are known for count-based snapshots and simulated data.
struct SnapshotPair {
  ProportionVector development;
  ProportionVector review;
  std::optional<long> dev_count;
  std::optional<long> review_count;

  SnapshotPair() = default;
  SnapshotPair(ProportionVector development_in, ProportionVector review_in,
               std::optional<long> dev_count_in = std::nullopt,
               std::optional<long> review_count_in = std::nullopt);
};

/// Raw (ungrouped) observations of one attribute at development and
/// review, as consumed by the variance-ratio accuracy index.
struct RawSamplePair {
  std::vector<double> x;  // development observations
  std::vector<double> y;  // review observations

  RawSamplePair() = default;
  RawSamplePair(std::vector<double> x_in, std::vector<double> y_in);
};

/// A metric value with its rule-of-thumb classification. `value` may be
/// +infinity (see psi); check is_infinite() before using it numerically.
struct MetricOutcome {
  Metric metric = Metric::Psi;
  double value = 0.0;
  Band band = Band::NotClassified;
  std::vector<Diagnostic> flags;

  bool is_infinite() const { return std::isinf(value); }
  bool has_flag(Diagnostic d) const;
};

}  // namespace popstab
