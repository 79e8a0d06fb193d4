#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ehm/aggregate.hpp"
#include "ehm/likelihood.hpp"
#include "ehm/rates.hpp"

namespace ehm {

enum class CellStatus {
  Ok,          // events > 0, exposure > 0
  ZeroEvents,  // estimate 0 with SE 0, printed as 0 +- 0
  NoExposure,  // undefined (NA)
};

std::string_view cell_status_code(CellStatus s);

// One fitted parameter cell: lambda_hj (interval-restricted for the
// piecewise model) with its observed-information standard error.
struct ParamFit {
  TransitionKind kind = TransitionKind::HealthyToStroke;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  long events = 0;
  double exposure = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  CellStatus status = CellStatus::Ok;
};

struct FitResult {
  enum class Model { Homogeneous, Piecewise, Mortality };
  Model model = Model::Homogeneous;
  std::optional<Partition> partition;  // piecewise only
  std::vector<ParamFit> params;

  const ParamFit& at(TransitionKind k, std::size_t interval = 0) const;
};

// lambda_hj = N_hj / E_h, SE = sqrt(N_hj) / E_h. Degenerate cells become
// statuses, never failures. horizon fills the interval_hi column.
FitResult fit_homogeneous(const Aggregates& agg, double horizon = 0.0);

// Per (hj, l): lambda = A/B, SE = sqrt(A)/B.
FitResult fit_piecewise(const IntervalAggregates& agg);

struct MortalityFit {
  long n_uncens = 0;
  long n_cens = 0;
  double uncensored_time = 0.0;  // sum of observed T_i - U_i
  double time_at_risk = 0.0;     // uncensored_time + window * n_cens
  double estimate = 0.0;
  double se = 0.0;
  CellStatus status = CellStatus::Ok;
};

MortalityFit fit_mortality_counts(long n_uncens, double uncensored_time, long n_cens,
                                  double window);
MortalityFit fit_mortality(std::span<const SurvivalRecord> records, double window);

// Collapse an observed multi-state record to the two-state mortality view
// (all non-dead states merged to "alive").
SurvivalRecord collapse_to_survival(const ObservedRecord& rec);

}  // namespace ehm
