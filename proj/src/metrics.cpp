#include "popstab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace popstab {

namespace detail {

Band psi_band(double value) {
  if (value < kPsiSmallChangeMin) return Band::NoChange;
  if (value < kPsiSubstantialChangeMin) return Band::SmallChange;
  return Band::SubstantialChange;
}

Band pai_band(double value) {
  if (value < kPaiSmallChangeMin) return Band::NoChange;
  if (value < kPaiSubstantialChangeMin) return Band::SmallChange;
  return Band::SubstantialChange;
}

double psi_kernel(std::span<const double> q, std::span<const double> p) {
  double sum = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double qj = q[j];
    const double pj = p[j];
    if (qj == 0.0 && pj == 0.0) continue;
    if (qj == 0.0 || pj == 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    sum += (pj - qj) * std::log(pj / qj);
  }
  return sum;
}

double dpv_kernel(std::span<const double> q, std::span<const double> p,
                  std::size_t considered) {
  double max_change = 0.0;
  for (std::size_t j = 0; j < considered; ++j) {
    max_change = std::max(max_change, std::abs(p[j] - q[j]) / q[j]);
  }
  return max_change;
}

double gamma_kernel(std::span<const double> q, std::span<const double> p) {
  double sum = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    sum += std::sqrt(q[j]) * std::abs(p[j] - q[j]) / std::sqrt(1.0 - q[j]);
  }
  return sum;
}

double overlap_kernel(std::span<const double> q, std::span<const double> p) {
  double sum = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    sum += std::min(q[j], p[j]);
  }
  return sum;
}

double ks_kernel(std::span<const double> q, std::span<const double> p) {
  double cum_q = 0.0;
  double cum_p = 0.0;
  double max_gap = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    cum_q += q[j];
    cum_p += p[j];
    max_gap = std::max(max_gap, std::abs(cum_q - cum_p));
  }
  return max_gap;
}

}  // namespace detail

MetricOutcome psi(const SnapshotPair& pair) {
  const auto& q = pair.development.props;
  const auto& p = pair.review.props;

  MetricOutcome out;
  out.metric = Metric::Psi;
  bool zero_baseline = false;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if ((q[j] == 0.0) != (p[j] == 0.0)) {
      zero_baseline = true;
      break;
    }
  }
  out.value = detail::psi_kernel(q, p);
  if (zero_baseline) {
    out.flags.push_back(Diagnostic::ZeroBaselineLevel);
    out.band = Band::SubstantialChange;
  } else {
    out.band = detail::psi_band(out.value);
  }
  return out;
}

MetricOutcome dpv(const SnapshotPair& pair, std::optional<int> k_star) {
  const auto& q = pair.development.props;
  const auto& p = pair.review.props;

  std::size_t considered = q.size();
  if (k_star) {
    if (*k_star < 1 || static_cast<std::size_t>(*k_star) > q.size()) {
      throw StabilityError(ErrorCode::InvalidArgument,
                           "k_star must lie in [1, k]");
    }
    considered = static_cast<std::size_t>(*k_star);
  }
  for (std::size_t j = 0; j < considered; ++j) {
    if (q[j] == 0.0) {
      throw StabilityError(ErrorCode::ZeroBaselineLevel,
                           "development proportion is zero at level '" +
                               pair.development.levels[j] +
                               "'; the relative change is undefined");
    }
  }

  MetricOutcome out;
  out.metric = Metric::Dpv;
  out.value = detail::dpv_kernel(q, p, considered);
  out.band = Band::NotClassified;
  return out;
}

std::vector<double> effect_sizes(const SnapshotPair& pair) {
  const auto& q = pair.development.props;
  const auto& p = pair.review.props;

  std::vector<double> sizes(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] <= 0.0 || q[j] >= 1.0) {
      throw StabilityError(ErrorCode::ZeroBaselineLevel,
                           "effect size undefined at level '" +
                               pair.development.levels[j] +
                               "': development proportion must lie in (0, 1)");
    }
    sizes[j] = std::abs(p[j] - q[j]) / std::sqrt(q[j] * (1.0 - q[j]));
  }
  return sizes;
}

MetricOutcome gamma(const SnapshotPair& pair, double cutoff) {
  const auto& q = pair.development.props;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] <= 0.0 || q[j] >= 1.0) {
      throw StabilityError(ErrorCode::ZeroBaselineLevel,
                           "effect size undefined at level '" +
                               pair.development.levels[j] +
                               "': development proportion must lie in (0, 1)");
    }
  }

  MetricOutcome out;
  out.metric = Metric::EffectSize;
  out.value = detail::gamma_kernel(q, pair.review.props);
  out.band =
      out.value > cutoff ? Band::SubstantialChange : Band::NoChange;
  return out;
}

MetricOutcome overlap(const SnapshotPair& pair) {
  MetricOutcome out;
  out.metric = Metric::Overlapping;
  out.value =
      detail::overlap_kernel(pair.development.props, pair.review.props);
  out.band = Band::NotClassified;
  return out;
}

MetricOutcome ks(const SnapshotPair& pair) {
  if (!pair.development.ordinal) {
    throw StabilityError(
        ErrorCode::NominalAttributeKs,
        "the KS distance compares cumulative sums and needs ordered levels");
  }
  MetricOutcome out;
  out.metric = Metric::Ks;
  out.value = detail::ks_kernel(pair.development.props, pair.review.props);
  out.band = Band::NotClassified;
  return out;
}

MetricOutcome pai(const RawSamplePair& samples) {
  const auto& x = samples.x;
  const auto& y = samples.y;

  double x_mean = 0.0;
  for (double v : x) x_mean += v;
  x_mean /= static_cast<double>(x.size());

  double dev_ss = 0.0;
  for (double v : x) dev_ss += (v - x_mean) * (v - x_mean);
  dev_ss /= static_cast<double>(x.size());
  if (dev_ss <= 0.0) {
    throw StabilityError(ErrorCode::ZeroVariance,
                         "development sample has zero variance");
  }

  double review_ss = 0.0;
  for (double v : y) review_ss += (v - x_mean) * (v - x_mean);
  review_ss /= static_cast<double>(y.size());

  MetricOutcome out;
  out.metric = Metric::Pai;
  out.value = 0.5 * (1.0 + review_ss / dev_ss);
  out.band = detail::pai_band(out.value);
  return out;
}

}  // namespace popstab
