#pragma once

/// @file mc_engine.hpp
/// Multinomial null-hypothesis simulation: critical values and p-values
/// for any of the discrete stability metrics.
///
/// Replication r draws from its own RNG stream derived from (seed, r),
/// so results are independent of how replications are scheduled across
/// threads.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "popstab/types.hpp"

namespace popstab::mc {

struct McConfig {
  long m = 0;            // review sample size under the null
  long b = 0;            // number of null replications
  double alpha = 0.05;   // significance level
  std::uint64_t seed = 0;

  McConfig() = default;
  McConfig(long m_in, long b_in, double alpha_in, std::uint64_t seed_in);

  /// 1-based order-statistic index of the critical value:
  /// beta = floor(b * (1 - alpha)).
  long beta() const;
};

enum class SelectorKind {
  Psi,
  Dpv,
  EffectSizeGamma,
  OverlappingComplement,  // evaluates 1 - overlap so that larger == worse
  Ks,
};

std::string to_string(SelectorKind kind);
std::optional<SelectorKind> selector_from_string(const std::string& name);

/// Picks which discrepancy the null distribution is built for.
struct MetricSelector {
  SelectorKind kind = SelectorKind::Psi;

  /// Validates that the statistic is computable for baseline `q`
  /// (e.g. the max-ratio statistic needs strictly positive q).
  void check_computable(const ProportionVector& q) const;

  /// Unchecked evaluation of the discrepancy between q and p.
  double evaluate(const std::vector<double>& q,
                  const std::vector<double>& p) const;
};

struct McResult {
  std::string statistic_name;
  std::vector<double> null_draws_sorted;  // ascending, length b
  double critical_value = 0.0;
  std::optional<double> p_value;
  McConfig config;
  std::string generator;
};

/// Counter-style stream derivation: finalizes (seed, stream) into a
/// 64-bit engine seed. Streams for distinct indices are effectively
/// independent.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Draws counts from Multinomial(m, q) and returns them as proportions.
/// Counts always sum to m exactly.
ProportionVector sample_null_proportions(const ProportionVector& q, long m,
                                         std::mt19937_64& rng);

/// Simulates the null distribution of the selected statistic and returns
/// the critical value at level alpha as the beta-th ascending draw.
/// Deterministic for fixed (seed, b, m, q, selector); `threads` is an
/// execution hint that cannot change the result (0 = choose
/// automatically).
McResult critical_value(const MetricSelector& selector,
                        const ProportionVector& q, const McConfig& cfg,
                        int threads = 0);

/// As critical_value, and additionally computes the exceedance fraction
/// p = (1/b) Σ 1{Δ(q, P) ≤ Δ*_j} for the observed pair.
McResult p_value(const MetricSelector& selector, const SnapshotPair& pair,
                 const McConfig& cfg, int threads = 0);

}  // namespace popstab::mc
