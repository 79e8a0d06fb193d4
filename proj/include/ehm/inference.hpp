#pragma once

#include <utility>
#include <vector>

#include "ehm/estimate.hpp"

namespace ehm {

// Standard normal quantile, |Phi(quantile(p)) - p| <= 1e-9 on
// [1e-8, 1 - 1e-8].
double normal_quantile(double p);
double normal_cdf(double x);

// Two-sided Wald interval estimate +- z_{1-alpha/2} * se.
// Refuses NoExposure cells (throws std::domain_error via the FitResult
// overload); se = 0 degenerates to the point.
std::pair<double, double> wald_ci(double estimate, double se, double level);
std::pair<double, double> wald_ci(const ParamFit& cell, double level);

struct ContrastResult {
  double diff = 0.0;
  double se = 0.0;
  double level = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

// Difference fit1 - fit2 under asymptotic independence:
// Var(diff) = se1^2 + se2^2.
ContrastResult contrast(double est1, double se1, double est2, double se2, double level);
ContrastResult contrast(const ParamFit& a, const ParamFit& b, double level);

struct IntervalContrast {
  std::size_t interval = 0;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  bool skipped = false;  // either cell NA in this interval
  ContrastResult result;
};

struct PairwiseTests {
  std::vector<IntervalContrast> intervals;
  int comparisons = 0;  // number of raw (uncorrected) tests performed
};

// One Wald contrast per partition interval where both cells have ok or
// zero-events status.
PairwiseTests pairwise_age_tests(const FitResult& fit, TransitionKind a, TransitionKind b,
                                 double level);

}  // namespace ehm
