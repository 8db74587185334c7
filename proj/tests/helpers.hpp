#pragma once

// Shared test utilities: snapshot builders and random generators for
// the property suites.

#include <random>
#include <string>
#include <vector>

#include "popstab/types.hpp"

namespace popstab::test {

inline ProportionVector make_pv(const std::vector<double>& props,
                                bool ordinal = true) {
  std::vector<std::string> levels;
  for (std::size_t j = 0; j < props.size(); ++j) {
    levels.push_back("L" + std::to_string(j));
  }
  return ProportionVector(levels, props, ordinal);
}

inline SnapshotPair make_snapshot(const std::vector<double>& q,
                              const std::vector<double>& p,
                              bool ordinal = true) {
  return SnapshotPair(make_pv(q, ordinal), make_pv(p, ordinal));
}

/// Random strictly positive proportion vector with k levels; every
/// entry ends up in (floor, 1). The last entry is chosen so the
/// left-to-right floating sum is exactly 1.
inline std::vector<double> random_props(std::mt19937_64& rng, std::size_t k,
                                        double floor = 1e-3) {
  std::exponential_distribution<double> exp_draw(1.0);
  std::vector<double> props(k);
  double sum = 0.0;
  for (auto& p : props) {
    p = exp_draw(rng) + floor * static_cast<double>(k);
    sum += p;
  }
  for (auto& p : props) p /= sum;
  double partial = 0.0;
  for (std::size_t j = 0; j + 1 < k; ++j) partial += props[j];
  props[k - 1] = 1.0 - partial;
  return props;
}

inline std::size_t random_k(std::mt19937_64& rng, std::size_t lo = 2,
                            std::size_t hi = 8) {
  std::uniform_int_distribution<std::size_t> dist(lo, hi);
  return dist(rng);
}

}  // namespace popstab::test
