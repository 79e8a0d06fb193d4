#include "ehm/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ehm {

namespace {

// One (count, exposure, rate) cell; returns the cell's value contribution
// and writes score/hessian.
double cell_loglik(long count, double exposure, double rate, double& score, double& hessian,
                   bool& log_zero) {
  if (rate < 0.0) throw std::domain_error("loglik: negative rate");
  if (count > 0 && rate == 0.0) {
    log_zero = true;
    score = std::numeric_limits<double>::infinity();
    hessian = -std::numeric_limits<double>::infinity();
    return -std::numeric_limits<double>::infinity();
  }
  if (count == 0) {
    score = -exposure;
    hessian = 0.0;
    return -rate * exposure;
  }
  score = static_cast<double>(count) / rate - exposure;
  hessian = -static_cast<double>(count) / (rate * rate);
  return static_cast<double>(count) * std::log(rate) - rate * exposure;
}

}  // namespace

LogLikValue loglik(const Aggregates& agg, const RateSet& rates) {
  LogLikValue out;
  out.score.resize(kNumTransitions);
  out.hessian.resize(kNumTransitions);
  for (TransitionKind k : kAllTransitions) {
    const int i = index_of(k);
    out.value += cell_loglik(agg.count(k), agg.exposure(transition_from(k)), rates[k],
                             out.score[i], out.hessian[i], out.log_zero);
  }
  return out;
}

LogLikValue loglik_piecewise(const IntervalAggregates& agg, const PiecewiseRateSet& rates) {
  if (agg.partition.breakpoints() != rates.partition().breakpoints()) {
    throw std::invalid_argument("loglik_piecewise: partition mismatch");
  }
  const std::size_t b = agg.partition.intervals();
  LogLikValue out;
  out.score.resize(b * kNumTransitions);
  out.hessian.resize(b * kNumTransitions);
  for (std::size_t l = 0; l < b; ++l) {
    const Aggregates& cell = agg.cells[l];
    const RateSet& r = rates.interval_rates(l);
    for (TransitionKind k : kAllTransitions) {
      const std::size_t i = l * kNumTransitions + static_cast<std::size_t>(index_of(k));
      out.value += cell_loglik(cell.count(k), cell.exposure(transition_from(k)), r[k],
                               out.score[i], out.hessian[i], out.log_zero);
    }
  }
  return out;
}

LogLikValue loglik_mortality(std::span<const SurvivalRecord> records, double window,
                             double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("loglik_mortality: lambda must be > 0");
  long n_uncens = 0;
  KahanSum time_at_risk;
  for (const SurvivalRecord& rec : records) {
    if (rec.death_age) {
      if (*rec.death_age < rec.entry_age || *rec.death_age > rec.entry_age + window) {
        throw std::invalid_argument("loglik_mortality: death age outside (u, u+w]");
      }
      ++n_uncens;
      time_at_risk.add(*rec.death_age - rec.entry_age);
    } else {
      time_at_risk.add(window);
    }
  }
  LogLikValue out;
  out.score.resize(1);
  out.hessian.resize(1);
  const double total_time = time_at_risk.value();
  out.value = static_cast<double>(n_uncens) * std::log(lambda) - lambda * total_time;
  out.score[0] = static_cast<double>(n_uncens) / lambda - total_time;
  out.hessian[0] = -static_cast<double>(n_uncens) / (lambda * lambda);
  return out;
}

ScalarMax maximize_concave(const std::function<double(double)>& f, double lo, double hi,
                           double tol) {
  if (!(lo < hi)) throw std::invalid_argument("maximize_concave: need lo < hi");
  // Golden-section search; unimodality is guaranteed by concavity.
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  ScalarMax result;
  result.argmax = 0.5 * (a + b);
  result.at_bound = (a <= lo + tol && f(lo) >= f(result.argmax)) ||
                    (b >= hi - tol && f(hi) >= f(result.argmax));
  if (result.at_bound) {
    result.argmax = f(lo) >= f(hi) ? lo : hi;
  }
  return result;
}

NumericMleResult numeric_mle(const Aggregates& agg, const ParameterSpace& bounds) {
  NumericMleResult out;
  for (TransitionKind k : kAllTransitions) {
    const double count = static_cast<double>(agg.count(k));
    const double exposure = agg.exposure(transition_from(k));
    const double lo = bounds.lower(k);
    const double hi = bounds.upper(k);
    // The partial likelihood is concave per coordinate, so its maximum is
    // where the derivative changes sign; bisecting the derivative locates
    // it far more precisely than comparing nearly-flat function values.
    const auto slope = [&](double rate) { return count / rate - exposure; };
    double estimate;
    bool at_bound = false;
    if (count == 0.0 || slope(lo) <= 0.0) {
      estimate = lo;
      at_bound = true;
    } else if (slope(hi) >= 0.0) {
      estimate = hi;
      at_bound = true;
    } else {
      double a = lo;
      double b = hi;
      for (int iter = 0; iter < 200 && (b - a) > 1e-15 * a + 1e-300; ++iter) {
        const double mid = 0.5 * (a + b);
        if (slope(mid) > 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      estimate = 0.5 * (a + b);
    }
    out.rates.set(k, estimate);
    out.at_bound[index_of(k)] = at_bound;
  }
  return out;
}

}  // namespace ehm
