// Randomized property suites for the metric identities, the scorecard
// primitives and the logistic fit. Each suite runs at least 1000 cases
// with a fixed seed.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "popstab/metrics.hpp"
#include "popstab/scorecard.hpp"

using namespace popstab;
using test::make_snapshot;

namespace {

constexpr int kCases = 1000;

std::vector<double> perturbed(std::mt19937_64& rng,
                              const std::vector<double>& base) {
  // A valid proportion vector at total-variation distance > 0 from base.
  auto props = base;
  std::uniform_int_distribution<std::size_t> pick(0, props.size() - 1);
  std::size_t from = pick(rng);
  std::size_t to = pick(rng);
  while (to == from) to = pick(rng);
  const double shift =
      std::uniform_real_distribution<double>(1e-4, 0.5)(rng) * props[from];
  props[from] -= shift;
  props[to] += shift;
  return props;
}

}  // namespace

TEST_CASE("overlap equals one minus half the total variation") {
  std::mt19937_64 rng(101);
  for (int rep = 0; rep < kCases; ++rep) {
    const auto k = test::random_k(rng);
    const auto q = test::random_props(rng, k);
    const auto p = test::random_props(rng, k);
    double tv = 0.0;
    for (std::size_t j = 0; j < k; ++j) tv += std::abs(q[j] - p[j]);
    const double eta = overlap(make_snapshot(q, p)).value;
    CHECK(std::abs(eta - (1.0 - 0.5 * tv)) <= 1e-12);
  }
}

TEST_CASE("psi is symmetric on strictly positive pairs") {
  std::mt19937_64 rng(102);
  for (int rep = 0; rep < kCases; ++rep) {
    const auto k = test::random_k(rng);
    const auto q = test::random_props(rng, k);
    const auto p = test::random_props(rng, k);
    const double forward = psi(make_snapshot(q, p)).value;
    const double backward = psi(make_snapshot(p, q)).value;
    CHECK(std::abs(forward - backward) <= 1e-12 * (1.0 + forward));
    CHECK(forward >= 0.0);
  }
}

TEST_CASE("ks is bounded by the total variation distance") {
  std::mt19937_64 rng(103);
  for (int rep = 0; rep < kCases; ++rep) {
    const auto k = test::random_k(rng);
    const auto q = test::random_props(rng, k);
    const auto p = test::random_props(rng, k);
    const double d = ks(make_snapshot(q, p)).value;
    const double bound = 1.0 - overlap(make_snapshot(q, p)).value;
    CHECK(d <= bound + 1e-12);
  }
}

TEST_CASE("gamma is the development-weighted effect size sum") {
  std::mt19937_64 rng(104);
  for (int rep = 0; rep < kCases; ++rep) {
    const auto k = test::random_k(rng);
    const auto q = test::random_props(rng, k);
    const auto p = test::random_props(rng, k);
    const auto pair = make_snapshot(q, p);
    const auto sizes = effect_sizes(pair);
    double weighted = 0.0;
    for (std::size_t j = 0; j < k; ++j) weighted += q[j] * sizes[j];
    CHECK(std::abs(gamma(pair).value - weighted) <= 1e-12);
  }
}

TEST_CASE("identity of indiscernibles") {
  std::mt19937_64 rng(105);
  for (int rep = 0; rep < kCases; ++rep) {
    const auto k = test::random_k(rng);
    const auto q = test::random_props(rng, k);

    const auto same = make_snapshot(q, q);
    CHECK(psi(same).value == 0.0);
    CHECK(dpv(same).value == 0.0);
    CHECK(gamma(same).value == 0.0);
    CHECK(ks(same).value == 0.0);
    CHECK(overlap(same).value == 1.0);

    const auto moved = make_snapshot(q, perturbed(rng, q));
    CHECK(psi(moved).value > 0.0);
    CHECK(dpv(moved).value > 0.0);
    CHECK(gamma(moved).value > 0.0);
    CHECK(overlap(moved).value < 1.0);
  }
}

TEST_CASE("level permutations") {
  std::mt19937_64 rng(106);
  for (int rep = 0; rep < kCases; ++rep) {
    const auto k = test::random_k(rng, 3, 8);
    const auto q = test::random_props(rng, k);
    const auto p = test::random_props(rng, k);

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> q_perm(k);
    std::vector<double> p_perm(k);
    for (std::size_t j = 0; j < k; ++j) {
      q_perm[j] = q[perm[j]];
      p_perm[j] = p[perm[j]];
    }

    const auto original = make_snapshot(q, p);
    const auto shuffled = make_snapshot(q_perm, p_perm);
    CHECK(std::abs(psi(original).value - psi(shuffled).value) <= 1e-12);
    CHECK(std::abs(dpv(original).value - dpv(shuffled).value) <= 1e-12);
    CHECK(std::abs(gamma(original).value - gamma(shuffled).value) <= 1e-12);
    CHECK(std::abs(overlap(original).value - overlap(shuffled).value) <=
          1e-12);
  }

  // The KS distance depends on the order: reordering a nominal-style
  // difference pattern changes the running sums.
  const double before = ks(make_snapshot({0.2, 0.2, 0.6}, {0.1, 0.1, 0.8})).value;
  const double after = ks(make_snapshot({0.2, 0.6, 0.2}, {0.1, 0.8, 0.1})).value;
  CHECK(std::abs(before - 0.2) <= 1e-12);
  CHECK(std::abs(after - 0.1) <= 1e-12);
}

TEST_CASE("accuracy index is scale invariant") {
  std::mt19937_64 rng(107);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::uniform_real_distribution<double> scale_draw(0.1, 10.0);
  for (int rep = 0; rep < kCases; ++rep) {
    const std::size_t n = 2 + rng() % 28;
    const std::size_t m = 1 + rng() % 29;
    std::vector<double> x(n);
    std::vector<double> y(m);
    for (auto& v : x) v = normal(rng);
    for (auto& v : y) v = normal(rng);
    const double spread =
        *std::max_element(x.begin(), x.end()) -
        *std::min_element(x.begin(), x.end());
    if (spread <= 1e-9) continue;

    double c = scale_draw(rng);
    if (rng() % 2 == 0) c = -c;
    auto scaled_x = x;
    auto scaled_y = y;
    for (auto& v : scaled_x) v *= c;
    for (auto& v : scaled_y) v *= c;

    const double base = pai(RawSamplePair(x, y)).value;
    const double scaled = pai(RawSamplePair(scaled_x, scaled_y)).value;
    CHECK(std::abs(base - scaled) <= 1e-12 * std::max(1.0, base));
  }
}

TEST_CASE("woe and iv vanish when defaults are independent of levels") {
  std::mt19937_64 rng(108);
  for (int rep = 0; rep < kCases; ++rep) {
    // Every level is a multiple of the same base cell, so each level
    // default rate matches the total exactly and the log odds are 0.
    const long base_n = 20 + static_cast<long>(rng() % 50);
    const long base_d = 1 + static_cast<long>(rng() % (base_n - 1));
    const int k = 2 + static_cast<int>(rng() % 5);
    std::vector<std::string> levels;
    std::vector<long> n_j;
    std::vector<long> d_j;
    for (int j = 0; j < k; ++j) {
      const long mult = 1 + static_cast<long>(rng() % 9);
      levels.push_back("L" + std::to_string(j));
      n_j.push_back(mult * base_n);
      d_j.push_back(mult * base_d);
    }
    const scorecard::GroupedCounts counts(levels, n_j, d_j);
    for (double w : scorecard::woe(counts).woe) CHECK(w == 0.0);
    CHECK(scorecard::iv(counts).value == 0.0);
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937_64 rng(109);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double step = 1e-5;
  for (int rep = 0; rep < kCases; ++rep) {
    const std::size_t n = 5 + rng() % 35;
    const std::size_t p = 1 + rng() % 3;
    std::vector<std::vector<double>> features(n, std::vector<double>(p));
    std::vector<int> outcomes(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) features[i][j] = normal(rng);
      outcomes[i] = rng() % 2;
    }
    std::vector<double> params(p + 1);
    for (auto& value : params) value = 0.5 * normal(rng);

    const auto gradient =
        scorecard::log_likelihood_gradient(features, outcomes, params);
    for (std::size_t j = 0; j < params.size(); ++j) {
      auto plus = params;
      auto minus = params;
      plus[j] += step;
      minus[j] -= step;
      const double fd =
          (scorecard::log_likelihood(features, outcomes, plus) -
           scorecard::log_likelihood(features, outcomes, minus)) /
          (2.0 * step);
      const double denom = std::max(1.0, std::abs(gradient[j]));
      CHECK(std::abs(gradient[j] - fd) / denom <= 1e-6);
    }
  }
}

TEST_CASE("log likelihood never decreases across newton iterations") {
  std::mt19937_64 rng(110);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < kCases; ++rep) {
    const std::size_t n = 30 + rng() % 170;
    std::vector<std::vector<double>> features(n, std::vector<double>(2));
    std::vector<int> outcomes(n);
    bool has_both = false;
    for (std::size_t i = 0; i < n; ++i) {
      features[i][0] = normal(rng);
      features[i][1] = normal(rng);
      const double p =
          1.0 / (1.0 + std::exp(-(normal(rng) * 0.3 + features[i][0])));
      outcomes[i] = unit(rng) < p;
    }
    for (std::size_t i = 1; i < n; ++i) {
      if (outcomes[i] != outcomes[0]) has_both = true;
    }
    if (!has_both) continue;

    const auto fit = scorecard::fit_logistic(features, outcomes);
    for (std::size_t t = 1; t < fit.log_likelihood_trace.size(); ++t) {
      const double prev = fit.log_likelihood_trace[t - 1];
      CHECK(fit.log_likelihood_trace[t] >=
            prev - 1e-10 * (1.0 + std::abs(prev)));
    }
  }
}
