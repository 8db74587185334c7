#pragma once

/// @file metrics.hpp
/// Population stability metrics on paired development/review snapshots.
/// Every operation is a pure function of its inputs.

#include <optional>
#include <span>
#include <vector>

#include "popstab/types.hpp"

namespace popstab {

/// Rule-of-thumb bands (Lewis) for the population stability index.
inline constexpr double kPsiSmallChangeMin = 0.1;
inline constexpr double kPsiSubstantialChangeMin = 0.25;

/// Rule-of-thumb bands for the accuracy index.
inline constexpr double kPaiSmallChangeMin = 1.1;
inline constexpr double kPaiSubstantialChangeMin = 1.5;

/// Default practical-significance cutoff for the weighted effect size.
/// 0.05 is a common stricter alternative; both are plain parameters.
inline constexpr double kGammaDefaultCutoff = 0.1;

/// Population stability index Σ (P_j − q_j)·ln(P_j/q_j).
///
/// A level that is empty on exactly one side makes the index infinite;
/// the outcome is then flagged ZeroBaselineLevel and classified as a
/// substantial change. A level empty on both sides contributes zero.
MetricOutcome psi(const SnapshotPair& pair);

/// Maximum relative proportion change max_j |P_j − q_j| / q_j over the
/// first k_star levels (all levels when absent). The band is left
/// NotClassified: interpretation needs a user threshold, applied at the
/// report layer.
MetricOutcome dpv(const SnapshotPair& pair,
                  std::optional<int> k_star = std::nullopt);

/// Per-level effect sizes |P_j − q_j| / sqrt(q_j(1 − q_j)).
std::vector<double> effect_sizes(const SnapshotPair& pair);

/// Weighted effect size Γ = Σ_j sqrt(q_j)·|P_j − q_j| / sqrt(1 − q_j),
/// the development-weighted average of the per-level effect sizes.
/// Values above `cutoff` classify as a substantial change.
MetricOutcome gamma(const SnapshotPair& pair,
                    double cutoff = kGammaDefaultCutoff);

/// Overlapping statistic Σ_j min(q_j, P_j): the probability mass the
/// two distributions share. No built-in band; the report layer may
/// apply an optional threshold.
MetricOutcome overlap(const SnapshotPair& pair);

/// Discrete two-sample Kolmogorov-Smirnov distance
/// max_j |F_q(x(j)) − F_P(x(j))| on the cumulative level sums.
/// Requires an ordinal attribute.
MetricOutcome ks(const SnapshotPair& pair);

/// Accuracy index ½·(1 + [(1/m)Σ(Y_j − X̄)²] / [(1/n)Σ(X_j − X̄)²]),
/// the variance-ratio measure for raw attribute observations.
MetricOutcome pai(const RawSamplePair& samples);

namespace detail {

// Banding helpers shared with the reporting layer.
Band psi_band(double value);
Band pai_band(double value);

// Unchecked numeric kernels used by the Monte-Carlo engine. `q` and `p`
// must have equal length and satisfy the callers' preconditions.
double psi_kernel(std::span<const double> q, std::span<const double> p);
double dpv_kernel(std::span<const double> q, std::span<const double> p,
                  std::size_t considered);
double gamma_kernel(std::span<const double> q, std::span<const double> p);
double overlap_kernel(std::span<const double> q, std::span<const double> p);
double ks_kernel(std::span<const double> q, std::span<const double> p);

}  // namespace detail

}  // namespace popstab
