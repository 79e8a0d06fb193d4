#include "ehm/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ehm {

ParameterSpace::ParameterSpace(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("ParameterSpace: epsilon must lie in (0,1)");
  }
  epsilon.fill(eps);
}

RateSet::RateSet(const std::array<double, kNumTransitions>& values) {
  values_.fill(0.0);
  for (TransitionKind k : kAllTransitions) set(k, values[index_of(k)]);
}

void RateSet::set(TransitionKind k, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("RateSet: rate must be finite and >= 0");
  }
  values_[index_of(k)] = rate;
}

double RateSet::total_exit_rate(State h) const {
  if (h == State::Dead) {
    throw std::domain_error("total_exit_rate: Dead is absorbing");
  }
  double sum = 0.0;
  for (TransitionKind k : kAllTransitions) {
    if (transition_from(k) == h) sum += values_[index_of(k)];
  }
  return sum;
}

Partition::Partition(std::vector<double> breakpoints) : breaks_(std::move(breakpoints)) {
  if (breaks_.size() < 2) {
    throw std::invalid_argument("Partition: need at least {0, tau}");
  }
  if (breaks_.front() != 0.0) {
    throw std::invalid_argument("Partition: first breakpoint must be 0");
  }
  for (std::size_t i = 1; i < breaks_.size(); ++i) {
    if (!(breaks_[i] > breaks_[i - 1])) {
      throw std::invalid_argument("Partition: breakpoints must be strictly increasing");
    }
  }
}

std::size_t Partition::interval_of(double t) const {
  if (!(t > 0.0) || t > horizon()) {
    throw std::domain_error("Partition::interval_of: t outside (0, tau]");
  }
  // smallest l with t <= t_{l+1}
  auto it = std::lower_bound(breaks_.begin() + 1, breaks_.end(), t);
  return static_cast<std::size_t>(it - (breaks_.begin() + 1));
}

PiecewiseRateSet::PiecewiseRateSet(Partition partition, std::vector<RateSet> per_interval)
    : partition_(std::move(partition)), cells_(std::move(per_interval)) {
  if (cells_.size() != partition_.intervals()) {
    throw std::invalid_argument("PiecewiseRateSet: one RateSet per interval required, got " +
                                std::to_string(cells_.size()) + " for " +
                                std::to_string(partition_.intervals()) + " intervals");
  }
}

PiecewiseRateSet PiecewiseRateSet::homogeneous(const RateSet& rates, double tau) {
  return PiecewiseRateSet(Partition::trivial(tau), {rates});
}

double PiecewiseRateSet::rate_at(TransitionKind k, double t) const {
  return cells_[partition_.interval_of(t)][k];
}

double PiecewiseRateSet::total_exit_rate(State h, double t) const {
  return cells_[partition_.interval_of(t)].total_exit_rate(h);
}

EntryAgeDist EntryAgeDist::uniform(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo)) {
    throw std::invalid_argument("EntryAgeDist::uniform: need 0 <= lo < hi");
  }
  EntryAgeDist d;
  d.kind_ = Kind::Uniform;
  d.params_ = {lo, hi};
  return d;
}

EntryAgeDist EntryAgeDist::degenerate(double u0) {
  if (!(u0 >= 0.0)) throw std::invalid_argument("EntryAgeDist::degenerate: u0 < 0");
  EntryAgeDist d;
  d.kind_ = Kind::Degenerate;
  d.params_ = {u0};
  return d;
}

EntryAgeDist EntryAgeDist::empirical(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("EntryAgeDist::empirical: empty list");
  for (double v : values) {
    if (!(v >= 0.0)) throw std::invalid_argument("EntryAgeDist::empirical: value < 0");
  }
  EntryAgeDist d;
  d.kind_ = Kind::Empirical;
  d.params_ = std::move(values);
  return d;
}

double EntryAgeDist::min() const {
  if (kind_ == Kind::Empirical) return *std::min_element(params_.begin(), params_.end());
  return params_.front();
}

double EntryAgeDist::max() const {
  if (kind_ == Kind::Empirical) return *std::max_element(params_.begin(), params_.end());
  return params_.back();
}

void ObservationScheme::validate() const {
  if (!(window > 0.0) || window > tau) {
    throw std::invalid_argument("ObservationScheme: need 0 < window <= tau");
  }
  if (entry_age.max() > tau - window) {
    throw std::invalid_argument("ObservationScheme: entry ages must lie in [0, tau - window]");
  }
}

}  // namespace ehm
