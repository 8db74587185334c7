#include "popstab/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "popstab/metrics.hpp"
#include "popstab/version.hpp"

namespace popstab::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// Conditional-binomial multinomial draw: level j gets
// Binomial(remaining, q_j / q_rest). Exact and O(k) per draw.
void multinomial_counts(const std::vector<double>& q, long m,
                        std::mt19937_64& rng, std::vector<long>& counts) {
  const std::size_t k = q.size();
  counts.assign(k, 0);
  long remaining = m;
  double rest = 1.0;
  for (std::size_t j = 0; j + 1 < k && remaining > 0; ++j) {
    if (q[j] <= 0.0) continue;
    double p = q[j] / rest;
    if (p >= 1.0) {
      counts[j] = remaining;
      remaining = 0;
      break;
    }
    std::binomial_distribution<long> dist(remaining, p);
    counts[j] = dist(rng);
    remaining -= counts[j];
    rest -= q[j];
    if (rest <= 0.0) break;
  }
  if (remaining > 0) counts[k - 1] += remaining;
}

}  // namespace

McConfig::McConfig(long m_in, long b_in, double alpha_in,
                   std::uint64_t seed_in)
    : m(m_in), b(b_in), alpha(alpha_in), seed(seed_in) {
  if (m < 1) {
    throw StabilityError(ErrorCode::InvalidArgument, "m must be positive");
  }
  if (b < 100) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "at least 100 replications are required");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "alpha must lie in (0, 1)");
  }
  if (beta() < 1) {
    throw StabilityError(ErrorCode::InvalidArgument,
                         "floor(b(1-alpha)) must be at least 1");
  }
}

long McConfig::beta() const {
  return static_cast<long>(
      std::floor(static_cast<double>(b) * (1.0 - alpha)));
}

std::string to_string(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::Psi: return "psi";
    case SelectorKind::Dpv: return "dpv";
    case SelectorKind::EffectSizeGamma: return "effect_size";
    case SelectorKind::OverlappingComplement: return "overlapping";
    case SelectorKind::Ks: return "ks";
  }
  return "unknown";
}

std::optional<SelectorKind> selector_from_string(const std::string& name) {
  if (name == "psi") return SelectorKind::Psi;
  if (name == "dpv") return SelectorKind::Dpv;
  if (name == "effect_size" || name == "gamma")
    return SelectorKind::EffectSizeGamma;
  if (name == "overlapping" || name == "overlap")
    return SelectorKind::OverlappingComplement;
  if (name == "ks") return SelectorKind::Ks;
  return std::nullopt;
}

void MetricSelector::check_computable(const ProportionVector& q) const {
  switch (kind) {
    case SelectorKind::Dpv:
      for (std::size_t j = 0; j < q.props.size(); ++j) {
        if (q.props[j] == 0.0) {
          throw StabilityError(ErrorCode::ZeroBaselineLevel,
                               "max-ratio statistic needs q > 0 at level '" +
                                   q.levels[j] + "'");
        }
      }
      break;
    case SelectorKind::EffectSizeGamma:
      for (std::size_t j = 0; j < q.props.size(); ++j) {
        if (q.props[j] <= 0.0 || q.props[j] >= 1.0) {
          throw StabilityError(ErrorCode::ZeroBaselineLevel,
                               "effect sizes need q in (0, 1) at level '" +
                                   q.levels[j] + "'");
        }
      }
      break;
    case SelectorKind::Ks:
      if (!q.ordinal) {
        throw StabilityError(ErrorCode::NominalAttributeKs,
                             "KS needs an ordinal attribute");
      }
      break;
    default:
      break;
  }
}

double MetricSelector::evaluate(const std::vector<double>& q,
                                const std::vector<double>& p) const {
  switch (kind) {
    case SelectorKind::Psi:
      return detail::psi_kernel(q, p);
    case SelectorKind::Dpv:
      return detail::dpv_kernel(q, p, q.size());
    case SelectorKind::EffectSizeGamma:
      return detail::gamma_kernel(q, p);
    case SelectorKind::OverlappingComplement:
      return 1.0 - detail::overlap_kernel(q, p);
    case SelectorKind::Ks:
      return detail::ks_kernel(q, p);
  }
  return 0.0;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(
      splitmix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1)));
}

ProportionVector sample_null_proportions(const ProportionVector& q, long m,
                                         std::mt19937_64& rng) {
  if (m < 1) {
    throw StabilityError(ErrorCode::InvalidArgument, "m must be positive");
  }
  std::vector<long> counts;
  multinomial_counts(q.props, m, rng, counts);
  std::vector<double> props(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) {
    props[j] = static_cast<double>(counts[j]) / static_cast<double>(m);
  }
  return ProportionVector(q.levels, std::move(props), q.ordinal);
}

namespace {

std::vector<double> run_replications(const MetricSelector& selector,
                                     const ProportionVector& q,
                                     const McConfig& cfg, int threads) {
  const long b = cfg.b;
  std::vector<double> draws(static_cast<std::size_t>(b));

  auto worker = [&](long first, long last) {
    std::vector<long> counts;
    std::vector<double> props(q.props.size());
    for (long r = first; r < last; ++r) {
      std::mt19937_64 rng(
          stream_seed(cfg.seed, static_cast<std::uint64_t>(r)));
      multinomial_counts(q.props, cfg.m, rng, counts);
      for (std::size_t j = 0; j < counts.size(); ++j) {
        props[j] =
            static_cast<double>(counts[j]) / static_cast<double>(cfg.m);
      }
      draws[static_cast<std::size_t>(r)] = selector.evaluate(q.props, props);
    }
  };

  int n_threads = threads;
  if (n_threads <= 0) {
    n_threads = static_cast<int>(
        std::min<unsigned>(std::thread::hardware_concurrency(), 8));
    if (n_threads < 1) n_threads = 1;
  }
  if (b < 2048 || n_threads == 1) {
    worker(0, b);
    return draws;
  }

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  const long chunk = (b + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const long first = t * chunk;
    const long last = std::min(b, first + chunk);
    if (first >= last) break;
    pool.emplace_back(worker, first, last);
  }
  for (auto& th : pool) th.join();
  return draws;
}

McResult build_result(const MetricSelector& selector,
                      const ProportionVector& q, const McConfig& cfg,
                      int threads) {
  selector.check_computable(q);
  McResult result;
  result.statistic_name = to_string(selector.kind);
  result.config = cfg;
  result.generator = kGeneratorName;
  result.null_draws_sorted = run_replications(selector, q, cfg, threads);
  std::sort(result.null_draws_sorted.begin(),
            result.null_draws_sorted.end());
  result.critical_value =
      result.null_draws_sorted[static_cast<std::size_t>(cfg.beta() - 1)];
  return result;
}

}  // namespace

McResult critical_value(const MetricSelector& selector,
                        const ProportionVector& q, const McConfig& cfg,
                        int threads) {
  return build_result(selector, q, cfg, threads);
}

McResult p_value(const MetricSelector& selector, const SnapshotPair& pair,
                 const McConfig& cfg, int threads) {
  McResult result = build_result(selector, pair.development, cfg, threads);
  const double observed =
      selector.evaluate(pair.development.props, pair.review.props);
  // Ties count toward the p-value: the comparison is Δ(q,P) ≤ Δ*_j.
  const auto& draws = result.null_draws_sorted;
  const auto first_ge =
      std::lower_bound(draws.begin(), draws.end(), observed);
  const auto exceed = static_cast<double>(draws.end() - first_ge);
  result.p_value = exceed / static_cast<double>(cfg.b);
  return result;
}

}  // namespace popstab::mc
