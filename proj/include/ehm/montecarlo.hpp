#pragma once

#include <array>
#include <span>
#include <vector>

#include "ehm/config.hpp"
#include "ehm/trajectory.hpp"

namespace ehm {

// Per-parameter summary of a replicated simulate-fit-CI experiment.
struct ParamCoverage {
  TransitionKind kind = TransitionKind::HealthyToStroke;
  double truth = 0.0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double mc_sd = 0.0;      // SD of the R point estimates
  double mc_se = 0.0;      // MC standard error of the bias, mc_sd / sqrt(R)
  double mean_se = 0.0;    // average reported (observed-information) SE
  double coverage = 0.0;   // fraction of nominal-level CIs covering truth
  long covered = 0;
  // Normality diagnostics of sqrt(n_all) (estimate - truth).
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_distance = 0.0;  // to the normal fitted by moments
  bool ks_reject = false;    // after the one-rerun rule
};

struct CoverageReport {
  long n_all = 0;
  int replications = 0;
  double level = 0.0;
  std::uint64_t seed = 0;
  double beta_oracle = 0.0;  // quadrature over transition_matrix
  double beta_mean = 0.0;    // mean of per-replication beta-hat
  double mean_n = 0.0;       // mean observed sample size
  int reruns = 0;
  std::vector<ParamCoverage> params;  // rates with truth > 0 only
};

// R independent cohorts, closed-form fit, Wald CI per rate. Deterministic
// for a fixed config and seed for any thread count. Refuses configs with
// observation probability 0. Requires homogeneous true rates.
CoverageReport coverage_study(const RunConfig& config, double level);

struct ConsistencyPoint {
  long n_all = 0;
  double rmse = 0.0;  // pooled relative RMSE over rates with truth > 0
};

struct ConsistencyCurve {
  std::vector<ConsistencyPoint> points;
  double slope = 0.0;  // OLS slope of log RMSE on log n_all, ~ -1/2
};

ConsistencyCurve consistency_curve(const RunConfig& config, std::span<const long> n_all_list);

// Fraction of observed persons at risk in each transient state at the
// grid ages (one cohort of config.n_all persons), and its large-sample
// limit m_h(t) from the exact transition law.
std::vector<std::array<double, kNumTransient>> empirical_mh(const RunConfig& config,
                                                            std::span<const double> grid);
std::vector<std::array<double, kNumTransient>> model_mh(const PiecewiseRateSet& rates,
                                                        const ObservationScheme& scheme,
                                                        std::span<const double> grid);

}  // namespace ehm
