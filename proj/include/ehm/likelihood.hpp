#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ehm/aggregate.hpp"
#include "ehm/rates.hpp"

namespace ehm {

// Log conditional likelihood up to data-only additive constants, with
// per-parameter score and (diagonal) Hessian. A rate of exactly 0 paired
// with a positive count is a typed "log-zero" condition (value = -inf),
// not an exception.
struct LogLikValue {
  double value = 0.0;
  std::vector<double> score;
  std::vector<double> hessian;  // diagonal, always <= 0
  bool log_zero = false;
};

// Homogeneous model: value = sum_hj (N_hj log l_hj - l_hj E_h);
// parameter order follows kAllTransitions.
LogLikValue loglik(const Aggregates& agg, const RateSet& rates);

// Piecewise model; parameter index = interval * 6 + transition.
LogLikValue loglik_piecewise(const IntervalAggregates& agg, const PiecewiseRateSet& rates);

// Two-state mortality model: entry age u, death age if observed within
// (u, u+w], otherwise censored.
struct SurvivalRecord {
  double entry_age = 0.0;
  std::optional<double> death_age;  // nullopt = censored at entry + window
};

LogLikValue loglik_mortality(std::span<const SurvivalRecord> records, double window,
                             double lambda);

// Coordinate-wise numeric maximization (golden-section/Brent style) of a
// concave 1-d function on [lo, hi] to absolute tolerance tol.
struct ScalarMax {
  double argmax = 0.0;
  bool at_bound = false;
};
ScalarMax maximize_concave(const std::function<double(double)>& f, double lo, double hi,
                           double tol = 1e-10);

// Independent oracle for the closed-form estimator: maximizes each
// transition's partial likelihood numerically inside the bounds.
struct NumericMleResult {
  RateSet rates;
  std::array<bool, kNumTransitions> at_bound{};
};
NumericMleResult numeric_mle(const Aggregates& agg, const ParameterSpace& bounds);

}  // namespace ehm
