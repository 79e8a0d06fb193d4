#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "ehm/estimate.hpp"
#include "ehm/inference.hpp"

using namespace ehm;

TEST_CASE("normal quantile accuracy against the CDF") {
  // |Phi(quantile(p)) - p| <= 1e-9 across the requested range
  for (double p : {1e-8, 1e-6, 1e-3, 0.025, 0.2, 0.5, 0.8, 0.975, 1.0 - 1e-3, 1.0 - 1e-8}) {
    const double z = normal_quantile(p);
    CHECK(std::abs(normal_cdf(z) - p) <= 1e-9);
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("wald_ci basics") {
  SUBCASE("published 95% half-width") {
    const auto [lo, hi] = wald_ci(0.0492, 0.000785, 0.95);
    CHECK((hi - lo) / 2.0 == doctest::Approx(0.00154).epsilon(1e-2));
    CHECK((hi + lo) / 2.0 == doctest::Approx(0.0492).epsilon(1e-12));
  }
  SUBCASE("se = 0 degenerates to the point") {
    const auto [lo, hi] = wald_ci(0.3, 0.0, 0.95);
    CHECK(lo == 0.3);
    CHECK(hi == 0.3);
  }
  SUBCASE("monotone in the level") {
    const auto [lo90, hi90] = wald_ci(1.0, 0.1, 0.90);
    const auto [lo99, hi99] = wald_ci(1.0, 0.1, 0.99);
    CHECK(hi99 - lo99 > hi90 - lo90);
  }
  SUBCASE("lower bound may be negative (no truncation at 0)") {
    const auto [lo, hi] = wald_ci(0.01, 0.02, 0.95);
    CHECK(lo < 0.0);
    CHECK(hi > 0.0);
  }
  SUBCASE("NA cells are refused") {
    ParamFit cell;
    cell.status = CellStatus::NoExposure;
    CHECK_THROWS_AS(wald_ci(cell, 0.95), std::domain_error);
  }
}

TEST_CASE("contrast arithmetic") {
  SUBCASE("published intensity difference") {
    const auto c = contrast(0.0701, 0.00078, 0.0209, 0.000102, 0.95);
    CHECK(c.diff == doctest::Approx(0.0492).epsilon(1e-10));
    CHECK(c.se * c.se == doctest::Approx(0.000000617).epsilon(0.02));
    CHECK(c.se == doctest::Approx(0.000785).epsilon(0.01));
    CHECK((c.ci_hi - c.ci_lo) / 2.0 == doctest::Approx(0.00154).epsilon(0.01));
    CHECK(c.p_value < 1e-10);
  }
  SUBCASE("3-4-5 arithmetic") {
    const auto c = contrast(0.1, 0.003, 0.09, 0.004, 0.95);
    CHECK(c.diff == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(c.se == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(c.z == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("identical fits") {
    const auto c = contrast(0.05, 0.001, 0.05, 0.001, 0.95);
    CHECK(c.diff == 0.0);
    CHECK(c.z == 0.0);
    CHECK(c.p_value == doctest::Approx(1.0));
  }
  SUBCASE("antisymmetry") {
    const auto a = contrast(0.07, 0.002, 0.02, 0.001, 0.95);
    const auto b = contrast(0.02, 0.001, 0.07, 0.002, 0.95);
    CHECK(a.diff == -b.diff);
    CHECK(a.z == -b.z);
    CHECK(a.p_value == doctest::Approx(b.p_value).epsilon(1e-14));
    CHECK(a.ci_hi - a.ci_lo == doctest::Approx(b.ci_hi - b.ci_lo).epsilon(1e-14));
  }
  SUBCASE("NA cells refused") {
    ParamFit ok;
    ok.status = CellStatus::Ok;
    ok.estimate = 0.1;
    ok.se = 0.01;
    ParamFit na;
    na.status = CellStatus::NoExposure;
    CHECK_THROWS_AS(contrast(ok, na, 0.95), std::domain_error);
  }
}

TEST_CASE("pairwise age tests over a piecewise fit") {
  // three intervals: both ok / one NA / both ok with close rates
  IntervalAggregates ia(Partition({0.0, 30.0, 35.0, 45.0}));
  auto set_cell = [&](std::size_t l, TransitionKind k, long n, double e) {
    ia.cells[l].counts[index_of(k)] = n;
    ia.cells[l].exposures[index_of(transition_from(k))] = e;
  };
  // ]80,85]: S1D 1584/18496 vs HD 9151/188161 -> strongly significant
  set_cell(0, TransitionKind::StrokeToDementia, 1584, 18496.0);
  set_cell(0, TransitionKind::HealthyToDementia, 9151, 188161.0);
  // middle interval: no stroke exposure -> skipped
  set_cell(1, TransitionKind::HealthyToDementia, 100, 1000.0);
  // ]90,95]: S1D 489/3544 vs HD 3745/28899 -> not significant
  set_cell(2, TransitionKind::StrokeToDementia, 489, 3544.0);
  set_cell(2, TransitionKind::HealthyToDementia, 3745, 28899.0);

  const FitResult fit = fit_piecewise(ia);
  const auto tests = pairwise_age_tests(fit, TransitionKind::StrokeToDementia,
                                        TransitionKind::HealthyToDementia, 0.95);
  REQUIRE(tests.intervals.size() == 3);
  CHECK(tests.comparisons == 2);

  CHECK(!tests.intervals[0].skipped);
  CHECK(std::abs(tests.intervals[0].result.z) > 1.96);  // ~16 sigma
  CHECK(std::abs(tests.intervals[0].result.z) > 10.0);

  CHECK(tests.intervals[1].skipped);

  CHECK(!tests.intervals[2].skipped);
  CHECK(std::abs(tests.intervals[2].result.z) < 1.96);  // "90 and older": no difference
}
