#include "ehm/inference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ehm {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

namespace {

// Rational approximation (Acklam), then one Halley refinement against
// erfc; the refined result is accurate to a few ulps.
double quantile_initial(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0,1)");
  }
  double x = quantile_initial(p);
  for (int i = 0; i < 2; ++i) {
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

std::pair<double, double> wald_ci(double estimate, double se, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::domain_error("wald_ci: level must lie in (0,1)");
  }
  if (!(se >= 0.0)) throw std::domain_error("wald_ci: se must be >= 0");
  if (se == 0.0) return {estimate, estimate};
  const double z = normal_quantile(0.5 + 0.5 * level);
  return {estimate - z * se, estimate + z * se};
}

std::pair<double, double> wald_ci(const ParamFit& cell, double level) {
  if (cell.status == CellStatus::NoExposure) {
    throw std::domain_error("wald_ci: cell has no exposure (NA)");
  }
  return wald_ci(cell.estimate, cell.se, level);
}

ContrastResult contrast(double est1, double se1, double est2, double se2, double level) {
  if (!(se1 >= 0.0) || !(se2 >= 0.0)) throw std::domain_error("contrast: negative se");
  ContrastResult r;
  r.diff = est1 - est2;
  r.se = std::sqrt(se1 * se1 + se2 * se2);
  r.level = level;
  std::tie(r.ci_lo, r.ci_hi) = wald_ci(r.diff, r.se, level);
  if (r.se > 0.0) {
    r.z = r.diff / r.se;
    r.p_value = std::erfc(std::abs(r.z) * M_SQRT1_2);
  } else if (r.diff == 0.0) {
    r.z = 0.0;
    r.p_value = 1.0;
  } else {
    r.z = std::copysign(std::numeric_limits<double>::infinity(), r.diff);
    r.p_value = 0.0;
  }
  return r;
}

ContrastResult contrast(const ParamFit& a, const ParamFit& b, double level) {
  if (a.status == CellStatus::NoExposure || b.status == CellStatus::NoExposure) {
    throw std::domain_error("contrast: NA cell refused");
  }
  return contrast(a.estimate, a.se, b.estimate, b.se, level);
}

PairwiseTests pairwise_age_tests(const FitResult& fit, TransitionKind a, TransitionKind b,
                                 double level) {
  if (fit.model != FitResult::Model::Piecewise || !fit.partition) {
    throw std::invalid_argument("pairwise_age_tests: piecewise fit required");
  }
  const Partition& part = *fit.partition;
  PairwiseTests out;
  for (std::size_t l = 0; l < part.intervals(); ++l) {
    const ParamFit& cell_a = fit.at(a, l);
    const ParamFit& cell_b = fit.at(b, l);
    IntervalContrast ic;
    ic.interval = l;
    ic.interval_lo = part.lower(l);
    ic.interval_hi = part.upper(l);
    if (cell_a.status != CellStatus::Ok || cell_b.status != CellStatus::Ok) {
      ic.skipped = true;
    } else {
      ic.result = contrast(cell_a, cell_b, level);
      ++out.comparisons;
    }
    out.intervals.push_back(ic);
  }
  return out;
}

}  // namespace ehm
