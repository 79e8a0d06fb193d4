#include "ehm/estimate.hpp"

#include <cmath>
#include <stdexcept>

namespace ehm {

std::string_view cell_status_code(CellStatus s) {
  switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::ZeroEvents: return "zero-events";
    case CellStatus::NoExposure: return "no-exposure";
  }
  return "?";
}

const ParamFit& FitResult::at(TransitionKind k, std::size_t interval) const {
  for (const ParamFit& p : params) {
    if (p.kind != k) continue;
    if (interval-- == 0) return p;
  }
  throw std::out_of_range("FitResult::at: no such parameter cell");
}

namespace {

ParamFit fit_cell(TransitionKind k, long events, double exposure, double lo, double hi) {
  ParamFit cell;
  cell.kind = k;
  cell.interval_lo = lo;
  cell.interval_hi = hi;
  cell.events = events;
  cell.exposure = exposure;
  if (exposure <= 0.0) {
    cell.status = CellStatus::NoExposure;
  } else if (events == 0) {
    cell.status = CellStatus::ZeroEvents;
  } else {
    cell.status = CellStatus::Ok;
    cell.estimate = static_cast<double>(events) / exposure;
    cell.se = std::sqrt(static_cast<double>(events)) / exposure;
  }
  return cell;
}

}  // namespace

FitResult fit_homogeneous(const Aggregates& agg, double horizon) {
  FitResult fit;
  fit.model = FitResult::Model::Homogeneous;
  for (TransitionKind k : kAllTransitions) {
    fit.params.push_back(
        fit_cell(k, agg.count(k), agg.exposure(transition_from(k)), 0.0, horizon));
  }
  return fit;
}

FitResult fit_piecewise(const IntervalAggregates& agg) {
  FitResult fit;
  fit.model = FitResult::Model::Piecewise;
  fit.partition = agg.partition;
  for (std::size_t l = 0; l < agg.partition.intervals(); ++l) {
    const Aggregates& cell = agg.cells[l];
    for (TransitionKind k : kAllTransitions) {
      fit.params.push_back(fit_cell(k, cell.count(k), cell.exposure(transition_from(k)),
                                    agg.partition.lower(l), agg.partition.upper(l)));
    }
  }
  return fit;
}

MortalityFit fit_mortality_counts(long n_uncens, double uncensored_time, long n_cens,
                                  double window) {
  if (n_uncens < 0 || n_cens < 0 || uncensored_time < 0.0 || !(window > 0.0)) {
    throw std::invalid_argument("fit_mortality: invalid aggregates");
  }
  MortalityFit fit;
  fit.n_uncens = n_uncens;
  fit.n_cens = n_cens;
  fit.uncensored_time = uncensored_time;
  fit.time_at_risk = uncensored_time + window * static_cast<double>(n_cens);
  if (fit.time_at_risk <= 0.0) {
    fit.status = CellStatus::NoExposure;
  } else if (n_uncens == 0) {
    fit.status = CellStatus::ZeroEvents;
  } else {
    fit.status = CellStatus::Ok;
    fit.estimate = static_cast<double>(n_uncens) / fit.time_at_risk;
    fit.se = std::sqrt(static_cast<double>(n_uncens)) / fit.time_at_risk;
  }
  return fit;
}

MortalityFit fit_mortality(std::span<const SurvivalRecord> records, double window) {
  long n_uncens = 0;
  long n_cens = 0;
  KahanSum uncensored_time;
  for (const SurvivalRecord& rec : records) {
    if (rec.death_age) {
      ++n_uncens;
      uncensored_time.add(*rec.death_age - rec.entry_age);
    } else {
      ++n_cens;
    }
  }
  return fit_mortality_counts(n_uncens, uncensored_time.value(), n_cens, window);
}

SurvivalRecord collapse_to_survival(const ObservedRecord& rec) {
  SurvivalRecord s;
  s.entry_age = rec.entry_age;
  s.death_age = rec.death_age();
  return s;
}

}  // namespace ehm
