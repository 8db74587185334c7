#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "popstab/metrics.hpp"

using namespace popstab;
using test::make_snapshot;
using test::make_pv;

// Configured proportions of the two shifted attributes in the bundled
// stable-outcome scenario; expected values below are direct evaluations
// of the defining formulas.
namespace {
const std::vector<double> kEnqDev = {0.30, 0.25, 0.20, 0.15, 0.05, 0.05};
const std::vector<double> kEnqReview = {0.40, 0.25, 0.10, 0.15, 0.05, 0.05};
const std::vector<double> kCcDev = {0.50, 0.30, 0.15, 0.05};
const std::vector<double> kCcReview = {0.30, 0.50, 0.15, 0.05};
}  // namespace

TEST_CASE("types reject malformed inputs") {
  CHECK_THROWS_AS(make_pv({0.5, 0.6}), StabilityError);       // sum != 1
  CHECK_THROWS_AS(make_pv({1.0}), StabilityError);            // k < 2
  CHECK_THROWS_AS(make_pv({-0.1, 1.1}), StabilityError);      // out of range
  CHECK_THROWS_AS(ProportionVector({"A", "A"}, {0.5, 0.5}, false),
                  StabilityError);                            // dup levels
  CHECK_THROWS_AS(SnapshotPair(make_pv({0.5, 0.5}),
                               ProportionVector({"X", "Y"}, {0.5, 0.5},
                                                true)),
                  StabilityError);  // level lists differ
  CHECK_THROWS_AS(RawSamplePair({1.0, 1.0, 1.0}, {2.0}), StabilityError);
}

TEST_CASE("psi identical distributions") {
  for (std::size_t k : {2u, 4u, 7u}) {
    std::mt19937_64 rng(k);
    const auto q = test::random_props(rng, k);
    const auto outcome = psi(make_snapshot(q, q));
    CHECK(outcome.value == 0.0);
    CHECK(outcome.band == Band::NoChange);
  }
}

TEST_CASE("psi on the shifted configurations") {
  const auto cc = psi(make_snapshot(kCcDev, kCcReview));
  // 0.2*ln(5/3) + 0.2*ln(5/3)
  const double cc_expected = 0.4 * std::log(5.0 / 3.0);
  CHECK(cc.value == doctest::Approx(cc_expected).epsilon(1e-12));
  CHECK(cc.band == Band::SmallChange);

  const auto enq = psi(make_snapshot(kEnqDev, kEnqReview));
  const double enq_expected =
      0.1 * std::log(4.0 / 3.0) + 0.1 * std::log(2.0);
  CHECK(enq.value == doctest::Approx(enq_expected).epsilon(1e-12));
  CHECK(enq.band == Band::NoChange);
}

TEST_CASE("psi symmetry of the shifted configurations") {
  const double forward = psi(make_snapshot(kCcDev, kCcReview)).value;
  const double backward = psi(make_snapshot(kCcReview, kCcDev)).value;
  CHECK(forward == doctest::Approx(backward).epsilon(1e-15));
}

TEST_CASE("psi zero handling") {
  SUBCASE("level empty at development only is infinite") {
    const auto outcome =
        psi(make_snapshot({0.0, 0.6, 0.4}, {0.02, 0.58, 0.40}));
    CHECK(outcome.is_infinite());
    CHECK(outcome.band == Band::SubstantialChange);
    CHECK(outcome.has_flag(Diagnostic::ZeroBaselineLevel));
  }
  SUBCASE("level empty at review only is infinite") {
    const auto outcome =
        psi(make_snapshot({0.02, 0.58, 0.40}, {0.0, 0.6, 0.4}));
    CHECK(outcome.is_infinite());
    CHECK(outcome.has_flag(Diagnostic::ZeroBaselineLevel));
  }
  SUBCASE("level empty on both sides contributes zero") {
    const auto outcome =
        psi(make_snapshot({0.5, 0.5, 0.0}, {0.3, 0.7, 0.0}));
    CHECK(!outcome.is_infinite());
    const double expected =
        -0.2 * std::log(3.0 / 5.0) + 0.2 * std::log(7.0 / 5.0);
    CHECK(outcome.value == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("dpv max relative change") {
  CHECK(dpv(make_snapshot(kEnqDev, kEnqDev)).value == 0.0);

  const auto enq = dpv(make_snapshot(kEnqDev, kEnqReview));
  CHECK(enq.value == 0.5);  // level 3: 0.10 / 0.20
  CHECK(enq.band == Band::NotClassified);

  const auto cc = dpv(make_snapshot(kCcDev, kCcReview));
  CHECK(cc.value == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("dpv truncation to the first k_star levels") {
  const auto truncated = dpv(make_snapshot(kEnqDev, kEnqReview), 2);
  CHECK(truncated.value ==
        doctest::Approx(0.1 / 0.3).epsilon(1e-12));  // level 3 excluded
  CHECK_THROWS_AS(dpv(make_snapshot(kEnqDev, kEnqReview), 0), StabilityError);
  CHECK_THROWS_AS(dpv(make_snapshot(kEnqDev, kEnqReview), 7), StabilityError);
}

TEST_CASE("dpv rejects an empty development level") {
  try {
    dpv(make_snapshot({0.0, 0.6, 0.4}, {0.1, 0.5, 0.4}));
    FAIL("expected ZeroBaselineLevel");
  } catch (const StabilityError& error) {
    CHECK(error.code() == ErrorCode::ZeroBaselineLevel);
  }
  // The empty level is fine once truncated away.
  const auto truncated =
      dpv(make_snapshot({0.6, 0.4, 0.0}, {0.5, 0.45, 0.05}), 2);
  CHECK(truncated.value == doctest::Approx(0.1 / 0.6).epsilon(1e-12));
}

TEST_CASE("effect sizes per level") {
  const auto zero = effect_sizes(make_snapshot(kCcDev, kCcDev));
  for (double g : zero) CHECK(g == 0.0);

  const auto gender = effect_sizes(make_snapshot({0.5, 0.5}, {0.505, 0.495}));
  CHECK(gender[0] == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(gender[1] == doctest::Approx(0.01).epsilon(1e-9));

  const auto shifted = effect_sizes(make_snapshot({0.3, 0.7}, {0.4, 0.6}));
  const double expected = 0.1 / std::sqrt(0.21);
  CHECK(shifted[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(shifted[1] == doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(effect_sizes(make_snapshot({0.0, 0.6, 0.4}, {0.1, 0.5, 0.4})),
                  StabilityError);
}

TEST_CASE("weighted effect size") {
  const auto small = gamma(make_snapshot({0.5, 0.5}, {0.505, 0.495}));
  CHECK(small.value == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(small.band == Band::NoChange);

  const auto cc = gamma(make_snapshot(kCcDev, kCcReview));
  const double cc_expected = 0.2 + 0.2 * std::sqrt(0.3 / 0.7);
  CHECK(cc.value == doctest::Approx(cc_expected).epsilon(1e-12));
  CHECK(cc.band == Band::SubstantialChange);

  CHECK(gamma(make_snapshot(kCcDev, kCcDev)).value == 0.0);

  // The cutoff is a parameter: 0.05 is the stricter common choice.
  const auto strict = gamma(make_snapshot({0.5, 0.5}, {0.46, 0.54}), 0.05);
  CHECK(strict.value == doctest::Approx(0.08).epsilon(1e-9));
  CHECK(strict.band == Band::SubstantialChange);
  CHECK(gamma(make_snapshot({0.5, 0.5}, {0.46, 0.54}), 0.1).band ==
        Band::NoChange);
}

TEST_CASE("overlapping statistic") {
  CHECK(overlap(make_snapshot(kCcDev, kCcDev)).value == 1.0);

  const auto cc = overlap(make_snapshot(kCcDev, kCcReview));
  CHECK(cc.value == doctest::Approx(0.80).epsilon(1e-12));
  CHECK(cc.band == Band::NotClassified);

  const auto enq = overlap(make_snapshot(kEnqDev, kEnqReview));
  CHECK(enq.value == doctest::Approx(0.90).epsilon(1e-12));
}

TEST_CASE("ks distance on ordinal attributes") {
  CHECK(ks(make_snapshot(kEnqDev, kEnqDev)).value == 0.0);

  const auto gender = ks(make_snapshot({0.5, 0.5}, {0.505, 0.495}));
  CHECK(gender.value == doctest::Approx(0.005).epsilon(1e-9));

  const auto enq = ks(make_snapshot(kEnqDev, kEnqReview));
  CHECK(enq.value == doctest::Approx(0.10).epsilon(1e-12));
}

TEST_CASE("ks rejects nominal attributes") {
  try {
    ks(make_snapshot(kCcDev, kCcReview, /*ordinal=*/false));
    FAIL("expected NominalAttributeKS");
  } catch (const StabilityError& error) {
    CHECK(error.code() == ErrorCode::NominalAttributeKs);
  }
}

TEST_CASE("accuracy index") {
  SUBCASE("identical samples give exactly one") {
    const auto outcome = pai(RawSamplePair({-2.0, 1.0, 1.0},
                                           {-2.0, 1.0, 1.0}));
    CHECK(outcome.value == 1.0);
    CHECK(outcome.band == Band::NoChange);
  }
  SUBCASE("disjoint samples can still score as unchanged") {
    const auto outcome =
        pai(RawSamplePair({-2.0, 1.0, 1.0}, {1.1, 1.2, 1.3}));
    CHECK(outcome.value == doctest::Approx(0.861667).epsilon(1e-4));
    CHECK(outcome.band == Band::NoChange);
  }
  SUBCASE("variance doubling is substantial") {
    const auto outcome = pai(RawSamplePair({-1.0, 1.0}, {-2.0, 2.0}));
    CHECK(outcome.value == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(outcome.band == Band::SubstantialChange);
  }
  SUBCASE("bands at the documented edges") {
    CHECK(detail::pai_band(1.09) == Band::NoChange);
    CHECK(detail::pai_band(1.1) == Band::SmallChange);
    CHECK(detail::pai_band(1.5) == Band::SubstantialChange);
  }
  SUBCASE("zero development variance is rejected") {
    CHECK_THROWS_AS(RawSamplePair({3.0, 3.0, 3.0}, {1.0, 2.0}),
                    StabilityError);
  }
}

TEST_CASE("psi band edges") {
  CHECK(detail::psi_band(0.0999) == Band::NoChange);
  CHECK(detail::psi_band(0.1) == Band::SmallChange);
  CHECK(detail::psi_band(0.2499) == Band::SmallChange);
  CHECK(detail::psi_band(0.25) == Band::SubstantialChange);
}
