// Acceptance gate: one criterion per invocation (argv[1] = 1..9), one
// PASS/FAIL line per criterion, exit 0 iff the criterion holds.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ehm/aggregate.hpp"
#include "ehm/estimate.hpp"
#include "ehm/inference.hpp"
#include "ehm/io.hpp"
#include "ehm/likelihood.hpp"
#include "ehm/montecarlo.hpp"
#include "ehm/trajectory.hpp"

using namespace ehm;

namespace {

int failures = 0;
std::string detail;

void check(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    detail += "\n    FAILED: " + what;
  }
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

RateSet table_scale_rates() {
  RateSet r;
  r.set(TransitionKind::HealthyToStroke, 0.010);
  r.set(TransitionKind::HealthyToDementia, 0.0209);
  r.set(TransitionKind::HealthyToDead, 0.0217);
  r.set(TransitionKind::StrokeToDementia, 0.0701);
  r.set(TransitionKind::StrokeToDead, 0.030);
  r.set(TransitionKind::DementiaToDead, 0.100);
  return r;
}

// --- criterion 1: two-state mortality point estimate ------------------

void criterion1() {
  const double t0 = now_seconds();
  const MortalityFit fit = fit_mortality_counts(43472, 180163.0, 202407, 9.0);
  const double elapsed = now_seconds() - t0;
  check(std::abs(fit.estimate - 0.0217) <= 1e-4,
        "rate " + format_number(fit.estimate) + " vs 0.0217 +- 1e-4");
  check(std::abs(fit.se - 0.000104) <= 2e-6,
        "se " + format_number(fit.se) + " vs 0.000104 +- 2e-6");
  check(elapsed < 1e-3, "runtime " + format_number(elapsed) + "s exceeds 1 ms");
}

// --- criterion 2: age-homogeneous published cells ---------------------

void criterion2() {
  Aggregates agg;
  agg.counts[index_of(TransitionKind::StrokeToDementia)] = 8105;
  agg.exposures[index_of(State::Stroke)] = 115566.0;
  agg.counts[index_of(TransitionKind::HealthyToDementia)] = 41775;
  agg.exposures[index_of(State::Healthy)] = 1997092.0;
  const FitResult fit = fit_homogeneous(agg, 63.0);

  const ParamFit& s1d = fit.at(TransitionKind::StrokeToDementia);
  check(std::abs(s1d.estimate - 0.0701) <= 1e-4, "S1-D rate vs 0.0701");
  check(std::abs(s1d.se - 0.00078) <= 1e-5, "S1-D se vs 0.00078");
  const ParamFit& hd = fit.at(TransitionKind::HealthyToDementia);
  check(std::abs(hd.estimate - 0.0209) <= 1e-4, "H-D rate vs 0.0209");
  check(std::abs(hd.se - 0.000102) <= 1e-6, "H-D se vs 0.000102");
}

// --- criterion 3: intensity-difference contrast -----------------------

void criterion3() {
  const double est1 = 8105.0 / 115566.0;
  const double se1 = std::sqrt(8105.0) / 115566.0;
  const double est2 = 41775.0 / 1997092.0;
  const double se2 = std::sqrt(41775.0) / 1997092.0;
  const ContrastResult c = contrast(est1, se1, est2, se2, 0.95);
  check(std::abs(c.diff - 0.0492) <= 1e-4, "difference vs 0.0492");
  check(std::abs(c.se * c.se / 0.000000617 - 1.0) <= 0.02,
        "variance " + format_number(c.se * c.se) + " vs 0.000000617 +- 2%");
  check(std::abs(c.se / 0.000785 - 1.0) <= 0.01,
        "se " + format_number(c.se) + " vs 0.000785 +- 1%");
  const double half = (c.ci_hi - c.ci_lo) / 2.0;
  check(std::abs(half / 0.00154 - 1.0) <= 0.01,
        "95% half-width " + format_number(half) + " vs 0.00154 +- 1%");
}

// --- criterion 4: full piecewise table --------------------------------

struct PublishedRow {
  double lo, hi;       // years since 50
  long events;
  double exposure;
  double rate, se;     // published; negative = NA row
};

// last-digit tolerance of a published decimal
double last_digit(double printed) {
  if (printed == 0.0) return 5e-5;  // "0" printed with 4 decimals
  std::ostringstream os;
  os << printed;
  const std::string s = os.str();
  const auto dot = s.find('.');
  if (dot == std::string::npos) return 1.0;
  return std::pow(10.0, -static_cast<double>(s.size() - dot - 1));
}

void criterion4() {
  using R = PublishedRow;
  const std::vector<R> s1d = {
      {0, 5, 13, 1199, 0.0108, 0.0030},       {5, 10, 66, 5156, 0.0128, 0.0016},
      {10, 15, 174, 10369, 0.0168, 0.0013},   {15, 20, 387, 14839, 0.0261, 0.0013},
      {20, 25, 815, 21737, 0.0375, 0.0013},   {25, 30, 1300, 23318, 0.0558, 0.0015},
      {30, 35, 1584, 18496, 0.0856, 0.0022},  {35, 40, 1138, 10101, 0.1127, 0.0033},
      {40, 45, 489, 3544, 0.1380, 0.0062},    {45, 50, 122, 716, 0.1705, 0.0154},
      {50, 55, 8, 97, 0.0827, 0.0292},        {55, 60, 0, 2, 0.0, 0.0},
      {60, 63, 0, 0, -1.0, -1.0},
  };
  const std::vector<R> hd = {
      {0, 5, 157, 116077, 0.0014, 0.0001},    {5, 10, 369, 245986, 0.0015, 0.0001},
      {10, 15, 800, 318543, 0.0025, 0.0001},  {15, 20, 1856, 350043, 0.0053, 0.0001},
      {20, 25, 4112, 360343, 0.0114, 0.0002}, {25, 30, 7212, 291776, 0.0247, 0.0003},
      {30, 35, 9151, 188161, 0.0486, 0.0005}, {35, 40, 7087, 87106, 0.0814, 0.0010},
      {40, 45, 3745, 28899, 0.1296, 0.0021},  {45, 50, 963, 5816, 0.1656, 0.0053},
      {50, 55, 92, 657, 0.1400, 0.0146},      {55, 60, 4, 27, 0.1509, 0.0755},
      {60, 63, 0, 0, -1.0, -1.0},
  };

  const Partition part({0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 63});
  IntervalAggregates agg(part);
  for (std::size_t l = 0; l < part.intervals(); ++l) {
    agg.cells[l].counts[index_of(TransitionKind::StrokeToDementia)] = s1d[l].events;
    agg.cells[l].exposures[index_of(State::Stroke)] = s1d[l].exposure;
    agg.cells[l].counts[index_of(TransitionKind::HealthyToDementia)] = hd[l].events;
    agg.cells[l].exposures[index_of(State::Healthy)] = hd[l].exposure;
  }
  const double t0 = now_seconds();
  const FitResult fit = fit_piecewise(agg);
  const double elapsed = now_seconds() - t0;

  const auto check_table = [&](const std::vector<R>& rows, TransitionKind k,
                               const char* name) {
    for (std::size_t l = 0; l < rows.size(); ++l) {
      const R& row = rows[l];
      const ParamFit& cell = fit.at(k, l);
      char label[64];
      std::snprintf(label, sizeof label, "%s ]%g,%g]", name, 50 + row.lo, 50 + row.hi);
      if (row.rate < 0.0) {
        check(cell.status == CellStatus::NoExposure, std::string(label) + " should be NA");
        continue;
      }
      if (row.events == 0) {
        check(cell.status == CellStatus::ZeroEvents && cell.estimate == 0.0 && cell.se == 0.0,
              std::string(label) + " should be 0 +- 0");
        continue;
      }
      check(std::abs(cell.estimate - row.rate) <= last_digit(row.rate),
            std::string(label) + " rate " + format_number(cell.estimate) + " vs " +
                format_number(row.rate));
      check(std::abs(cell.se - row.se) <= last_digit(row.se),
            std::string(label) + " se " + format_number(cell.se) + " vs " +
                format_number(row.se));
    }
  };
  check_table(s1d, TransitionKind::StrokeToDementia, "S1-D");
  check_table(hd, TransitionKind::HealthyToDementia, "H-D");
  check(elapsed < 1e-2, "runtime " + format_number(elapsed) + "s exceeds 10 ms");
}

// --- criterion 5: oracle equivalence ----------------------------------

void criterion5() {
  const double t0 = now_seconds();
  std::mt19937_64 gen(20260823);
  std::uniform_int_distribution<long> counts(0, 200000);
  std::uniform_real_distribution<double> expo(1.0, 2e6);
  const ParameterSpace bounds;
  for (int trial = 0; trial < 100; ++trial) {
    Aggregates agg;
    for (int k = 0; k < kNumTransitions; ++k) agg.counts[k] = counts(gen);
    for (int h = 0; h < kNumTransient; ++h) agg.exposures[h] = expo(gen);
    const auto numeric = numeric_mle(agg, bounds);
    const FitResult closed = fit_homogeneous(agg, 63.0);
    RateSet at_mle;
    for (TransitionKind k : kAllTransitions) {
      const ParamFit& cell = closed.at(k);
      if (cell.status != CellStatus::Ok) continue;
      at_mle.set(k, cell.estimate);
      check(std::abs(numeric.rates[k] - cell.estimate) <= 1e-8 * cell.estimate,
            "trial " + std::to_string(trial) + " " + std::string(transition_code(k)) +
                ": numeric " + format_number(numeric.rates[k]) + " vs closed " +
                format_number(cell.estimate));
    }
    const LogLikValue ll = loglik(agg, at_mle);
    for (TransitionKind k : kAllTransitions) {
      const ParamFit& cell = closed.at(k);
      if (cell.status != CellStatus::Ok) continue;
      // score = N/lambda - E; "zero within 1e-10 relative" to its E scale
      check(std::abs(ll.score[index_of(k)]) <= 1e-10 * cell.exposure,
            "trial " + std::to_string(trial) + " score " +
                format_number(ll.score[index_of(k)]));
    }
  }
  const double elapsed = now_seconds() - t0;
  check(elapsed < 1.0, "runtime " + format_number(elapsed) + "s exceeds 1 s");
}

// --- criterion 6: simulator against the exact law ---------------------

void criterion6() {
  const double t0 = now_seconds();
  const auto pw = PiecewiseRateSet::homogeneous(table_scale_rates(), 63.0);
  const int n = 100000;

  for (double t : {5.0, 20.0, 40.0}) {
    std::array<long, 4> hits{};
    Rng rng(6000 + static_cast<std::uint64_t>(t));
    for (int i = 0; i < n; ++i) {
      Trajectory traj = sample_trajectory(pw, 63.0, rng);
      ++hits[index_of(traj.state_at(t))];
    }
    const Matrix4 p = transition_matrix(pw, t);
    for (int j = 0; j < 4; ++j) {
      const double expect = p[0][j];
      const double freq = static_cast<double>(hits[j]) / n;
      const double se = std::sqrt(std::max(expect * (1.0 - expect), 1e-12) / n);
      check(std::abs(freq - expect) <= 3.0 * se,
            "state distribution at t=" + format_number(t) + " state " + std::to_string(j) +
                ": " + format_number(freq) + " vs " + format_number(expect) + " (3se " +
                format_number(3.0 * se) + ")");
    }
  }

  const ObservationScheme scheme;
  const double beta = observation_probability(pw, scheme);
  const Cohort cohort = sample_cohort(pw, scheme, n, 616);
  const double se = std::sqrt(beta * (1.0 - beta) / n);
  check(std::abs(cohort.summary.beta_hat - beta) <= 3.0 * se,
        "beta_hat " + format_number(cohort.summary.beta_hat) + " vs quadrature " +
            format_number(beta));
  const double elapsed = now_seconds() - t0;
  check(elapsed < 30.0, "runtime " + format_number(elapsed) + "s exceeds 30 s");
}

// --- criterion 7: Wald coverage and normality at n_all = 2e4 ----------

void criterion7() {
  const double t0 = now_seconds();
  RunConfig cfg;
  cfg.rates = PiecewiseRateSet::homogeneous(table_scale_rates(), 63.0);
  cfg.n_all = 20000;
  cfg.seed = 7001;
  cfg.replications = 500;
  const CoverageReport report = coverage_study(cfg, 0.95);
  for (const ParamCoverage& pc : report.params) {
    const std::string name(transition_code(pc.kind));
    check(pc.coverage >= 0.93 && pc.coverage <= 0.97,
          name + " coverage " + format_number(pc.coverage) + " outside [0.93, 0.97]");
    check(std::abs(pc.mean_se / pc.mc_sd - 1.0) <= 0.10,
          name + " mean se " + format_number(pc.mean_se) + " vs mc sd " +
              format_number(pc.mc_sd) + " beyond 10%");
    check(!pc.ks_reject, name + " KS normality rejected twice (D = " +
                             format_number(pc.ks_distance) + ")");
  }
  const double elapsed = now_seconds() - t0;
  check(elapsed < 300.0, "runtime " + format_number(elapsed) + "s exceeds 5 min");
}

// --- criterion 8: consistency slope -----------------------------------

void criterion8() {
  const double t0 = now_seconds();
  RunConfig cfg;
  cfg.rates = PiecewiseRateSet::homogeneous(table_scale_rates(), 63.0);
  cfg.seed = 8001;
  cfg.replications = 200;
  const long sizes[] = {1000, 10000, 100000};
  const ConsistencyCurve curve = consistency_curve(cfg, sizes);
  std::string points;
  for (const auto& p : curve.points) {
    points += " (" + std::to_string(p.n_all) + ", " + format_number(p.rmse) + ")";
  }
  check(curve.slope >= -0.6 && curve.slope <= -0.4,
        "slope " + format_number(curve.slope) + " outside [-0.6, -0.4]; points:" + points);
  const double elapsed = now_seconds() - t0;
  check(elapsed < 600.0, "runtime " + format_number(elapsed) + "s exceeds 10 min");
}

// --- criterion 9: structural identities -------------------------------

void criterion9() {
  const auto pw = PiecewiseRateSet::homogeneous(table_scale_rates(), 63.0);
  const ObservationScheme scheme;
  const Cohort cohort = sample_cohort(pw, scheme, 10000, 909);

  // piecewise with b = 1 is the homogeneous fit, value for value
  const Aggregates agg = aggregate_homogeneous(cohort.records);
  const IntervalAggregates one = aggregate_piecewise(cohort.records, Partition::trivial(63.0));
  const FitResult hom = fit_homogeneous(agg, 63.0);
  const FitResult deg = fit_piecewise(one);
  for (TransitionKind k : kAllTransitions) {
    const ParamFit& a = hom.at(k);
    const ParamFit& b = deg.at(k);
    check(a.events == b.events && a.status == b.status,
          "b=1 events/status mismatch " + std::string(transition_code(k)));
    check(a.exposure == b.exposure,
          "b=1 exposure mismatch " + std::string(transition_code(k)));
    check(a.estimate == b.estimate && a.se == b.se,
          "b=1 estimate/se mismatch " + std::string(transition_code(k)));
  }

  // interval aggregates sum to the global aggregates (counts exactly,
  // exposures to reduction rounding)
  const Partition part({0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 63});
  const Aggregates totals = aggregate_piecewise(cohort.records, part).totals();
  check(totals.counts == agg.counts, "interval counts do not sum to global counts");
  for (int h = 0; h < kNumTransient; ++h) {
    check(std::abs(totals.exposures[h] - agg.exposures[h]) <=
              1e-12 * (1.0 + agg.exposures[h]),
          "interval exposures do not sum to global exposure for state " + std::to_string(h));
  }

  // collapsed mortality fit equals the two-state homogeneous fit, bitwise
  std::vector<SurvivalRecord> survival;
  for (const auto& rec : cohort.records) survival.push_back(collapse_to_survival(rec));
  const MortalityFit mort = fit_mortality(survival, scheme.window);
  Aggregates collapsed;
  collapsed.counts[index_of(TransitionKind::HealthyToDead)] = mort.n_uncens;
  collapsed.exposures[index_of(State::Healthy)] = mort.time_at_risk;
  const ParamFit& two = fit_homogeneous(collapsed, 63.0).at(TransitionKind::HealthyToDead);
  check(two.estimate == mort.estimate && two.se == mort.se,
        "mortality reduction law not exact");

  // read/write round-trip identity and byte determinism
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ehm_acceptance";
  fs::create_directories(dir);
  write_cohort(cohort.records, dir / "p1.csv", dir / "e1.csv");
  const auto back = read_cohort(dir / "p1.csv", dir / "e1.csv");
  const Aggregates agg_back = aggregate_homogeneous(back);
  check(agg_back.counts == agg.counts && agg_back.exposures == agg.exposures,
        "cohort round-trip changed the aggregates");
  write_cohort(back, dir / "p2.csv", dir / "e2.csv");
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  check(slurp(dir / "p1.csv") == slurp(dir / "p2.csv") &&
            slurp(dir / "e1.csv") == slurp(dir / "e2.csv"),
        "cohort files are not byte-stable under rewrite");

  // seed determinism of the sampler itself
  const Cohort again = sample_cohort(pw, scheme, 10000, 909);
  write_cohort(again.records, dir / "p3.csv", dir / "e3.csv");
  check(slurp(dir / "p1.csv") == slurp(dir / "p3.csv") &&
            slurp(dir / "e1.csv") == slurp(dir / "e3.csv"),
        "same seed did not reproduce byte-identical cohort files");

  // fit file round-trip identity
  write_fit(hom, 0.95, dir / "f1.csv");
  const FitResult fback = read_fit(dir / "f1.csv");
  bool fit_same = fback.params.size() == hom.params.size();
  for (std::size_t i = 0; fit_same && i < fback.params.size(); ++i) {
    fit_same = fback.params[i].kind == hom.params[i].kind &&
               fback.params[i].events == hom.params[i].events &&
               fback.params[i].exposure == hom.params[i].exposure &&
               fback.params[i].estimate == hom.params[i].estimate &&
               fback.params[i].se == hom.params[i].se &&
               fback.params[i].status == hom.params[i].status;
  }
  check(fit_same, "fit file round-trip is not the identity");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1..9>\n", argv[0]);
    return 2;
  }
  const int criterion = std::atoi(argv[1]);
  switch (criterion) {
    case 1: criterion1(); break;
    case 2: criterion2(); break;
    case 3: criterion3(); break;
    case 4: criterion4(); break;
    case 5: criterion5(); break;
    case 6: criterion6(); break;
    case 7: criterion7(); break;
    case 8: criterion8(); break;
    case 9: criterion9(); break;
    default:
      std::fprintf(stderr, "unknown criterion %d\n", criterion);
      return 2;
  }
  if (failures == 0) {
    std::printf("criterion %d: PASS\n", criterion);
    return 0;
  }
  std::printf("criterion %d: FAIL (%d checks)%s\n", criterion, failures, detail.c_str());
  return 1;
}
