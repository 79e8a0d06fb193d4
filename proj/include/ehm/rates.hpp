#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ehm/states.hpp"

namespace ehm {

// Box bounds [eps, 1/eps] per transition for the numeric maximizer.
struct ParameterSpace {
  std::array<double, kNumTransitions> epsilon;

  explicit ParameterSpace(double eps = 1e-6);

  double lower(TransitionKind k) const { return epsilon[index_of(k)]; }
  double upper(TransitionKind k) const { return 1.0 / epsilon[index_of(k)]; }
};

// Age-homogeneous intensities, events per person-year.
class RateSet {
 public:
  RateSet() { values_.fill(0.0); }
  explicit RateSet(const std::array<double, kNumTransitions>& values);

  double operator[](TransitionKind k) const { return values_[index_of(k)]; }
  void set(TransitionKind k, double rate);

  // Sum of exit intensities out of h. Throws for the absorbing state.
  double total_exit_rate(State h) const;

 private:
  std::array<double, kNumTransitions> values_;
};

// Strictly increasing breakpoints 0 = t_0 < t_1 < ... < t_b = tau.
// Intervals are left-open / right-closed: ]t_{l-1}, t_l].
class Partition {
 public:
  explicit Partition(std::vector<double> breakpoints);

  std::size_t intervals() const { return breaks_.size() - 1; }
  double horizon() const { return breaks_.back(); }
  double lower(std::size_t l) const { return breaks_[l]; }
  double upper(std::size_t l) const { return breaks_[l + 1]; }
  const std::vector<double>& breakpoints() const { return breaks_; }

  // Index l (0-based) with t in ]t_l, t_{l+1}]. Throws outside (0, tau].
  std::size_t interval_of(double t) const;

  static Partition trivial(double tau) { return Partition({0.0, tau}); }

 private:
  std::vector<double> breaks_;
};

// Piecewise constant intensities on a shared partition.
class PiecewiseRateSet {
 public:
  PiecewiseRateSet(Partition partition, std::vector<RateSet> per_interval);

  // Single-interval (age-homogeneous) model on (0, tau].
  static PiecewiseRateSet homogeneous(const RateSet& rates, double tau);

  const Partition& partition() const { return partition_; }
  const RateSet& interval_rates(std::size_t l) const { return cells_[l]; }
  bool is_homogeneous() const { return cells_.size() == 1; }

  double rate_at(TransitionKind k, double t) const;
  double total_exit_rate(State h, double t) const;

 private:
  Partition partition_;
  std::vector<RateSet> cells_;
};

// Entry-age distribution for U (years since age 50 at study begin).
class EntryAgeDist {
 public:
  enum class Kind { Uniform, Degenerate, Empirical };

  static EntryAgeDist uniform(double lo, double hi);
  static EntryAgeDist degenerate(double u0);
  static EntryAgeDist empirical(std::vector<double> values);

  Kind kind() const { return kind_; }
  double min() const;
  double max() const;
  // Parameters: {lo, hi} for uniform, {u0} for degenerate, list otherwise.
  const std::vector<double>& params() const { return params_; }

 private:
  Kind kind_;
  std::vector<double> params_;
};

// Observation window: a person entering at age U is followed on (U, U+w].
struct ObservationScheme {
  double tau = 63.0;
  double window = 9.0;
  EntryAgeDist entry_age = EntryAgeDist::uniform(0.0, 54.0);

  // Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

}  // namespace ehm
