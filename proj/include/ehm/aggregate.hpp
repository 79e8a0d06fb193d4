#pragma once

#include <array>
#include <span>

#include "ehm/rates.hpp"
#include "ehm/states.hpp"
#include "ehm/trajectory.hpp"

namespace ehm {

// Sufficient statistics of the homogeneous likelihood: transition counts
// N_hj and person-years of exposure E_h inside the observation windows.
struct Aggregates {
  std::array<long, kNumTransitions> counts{};
  std::array<double, kNumTransient> exposures{};

  long count(TransitionKind k) const { return counts[index_of(k)]; }
  double exposure(State h) const { return exposures[index_of(h)]; }
  double total_exposure() const;
};

// Per-interval counts (A) and exposures (B) on a partition; transition
// ages and time at risk are clipped to each interval's intersection with
// the person's window.
struct IntervalAggregates {
  Partition partition;
  std::vector<Aggregates> cells;  // one per interval

  explicit IntervalAggregates(Partition p)
      : partition(std::move(p)), cells(partition.intervals()) {}

  // Sum over intervals in order; counts are exact, exposures are summed
  // with compensation.
  Aggregates totals() const;
};

Aggregates aggregate_homogeneous(std::span<const ObservedRecord> records);
Aggregates aggregate_homogeneous_serial(std::span<const ObservedRecord> records);

IntervalAggregates aggregate_piecewise(std::span<const ObservedRecord> records,
                                       const Partition& partition);
IntervalAggregates aggregate_piecewise_serial(std::span<const ObservedRecord> records,
                                              const Partition& partition);

// Compensated (Kahan) accumulator for person-year sums.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace ehm
