#include "ehm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ehm/parallel.hpp"

namespace ehm {

State Trajectory::state_at(double t) const {
  State s = State::Healthy;
  for (const Jump& j : jumps) {
    if (j.time > t) break;
    s = j.to;
  }
  return s;
}

std::optional<double> Trajectory::death_time() const {
  if (!jumps.empty() && jumps.back().to == State::Dead) return jumps.back().time;
  return std::nullopt;
}

Trajectory sample_trajectory(const PiecewiseRateSet& rates, double tau, Rng& rng) {
  if (!(tau > 0.0) || tau > rates.partition().horizon()) {
    throw std::invalid_argument("sample_trajectory: tau must lie in (0, partition horizon]");
  }
  Trajectory traj;
  traj.horizon = tau;

  const Partition& part = rates.partition();
  State h = State::Healthy;
  double s = 0.0;
  std::size_t l = 0;
  while (h != State::Dead && s < tau) {
    while (l + 1 < part.intervals() && s >= part.upper(l)) ++l;
    const double end = std::min(part.upper(l), tau);
    const RateSet& cell = rates.interval_rates(l);
    const double total = cell.total_exit_rate(h);
    if (total <= 0.0) {
      s = end;
      continue;
    }
    const double candidate = s + rng.exponential(total);
    if (candidate > end) {
      // Overshoot: advance to the breakpoint and resample (memoryless).
      s = end;
      continue;
    }
    // Destination j with probability lambda_hj / total, rates of the
    // interval containing the jump time.
    double pick = rng.uniform01() * total;
    State dest = State::Dead;
    for (TransitionKind k : kAllTransitions) {
      if (transition_from(k) != h) continue;
      pick -= cell[k];
      if (pick <= 0.0) {
        dest = transition_to(k);
        break;
      }
    }
    traj.jumps.push_back({candidate, dest});
    h = dest;
    s = candidate;
  }
  return traj;
}

std::vector<Episode> ObservedRecord::episodes() const {
  std::vector<Episode> eps;
  double start = entry_age;
  State state = entry_state;
  for (const ObservedEvent& e : events) {
    eps.push_back({start, e.age, state});
    start = e.age;
    state = e.to;
  }
  if (start < exit_age) eps.push_back({start, exit_age, state});
  return eps;
}

std::optional<double> ObservedRecord::death_age() const {
  if (!events.empty() && events.back().to == State::Dead) return events.back().age;
  return std::nullopt;
}

std::optional<ObservedRecord> observe(const Trajectory& traj, double u,
                                      const ObservationScheme& scheme) {
  if (!(u >= 0.0) || u > scheme.tau - scheme.window) {
    throw std::domain_error("observe: entry age outside [0, tau - window]");
  }
  const State at_entry = traj.state_at(u);
  if (at_entry == State::Dead) return std::nullopt;  // left-truncated

  const double window_end = u + scheme.window;
  double exit = window_end;
  if (auto death = traj.death_time(); death && *death <= window_end) exit = *death;

  ObservedRecord rec;
  rec.entry_age = u;
  rec.entry_state = at_entry;
  rec.exit_age = exit;
  for (const Jump& j : traj.jumps) {
    if (j.time > u && j.time <= exit) rec.events.push_back({j.time, j.to});
  }
  return rec;
}

namespace {

double sample_entry(const EntryAgeDist& dist, Rng& rng) {
  switch (dist.kind()) {
    case EntryAgeDist::Kind::Uniform:
      return dist.params()[0] + rng.uniform01() * (dist.params()[1] - dist.params()[0]);
    case EntryAgeDist::Kind::Degenerate:
      return dist.params()[0];
    case EntryAgeDist::Kind::Empirical: {
      const auto& v = dist.params();
      auto idx = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(v.size()));
      if (idx >= v.size()) idx = v.size() - 1;
      return v[idx];
    }
  }
  throw std::logic_error("sample_entry: unknown distribution kind");
}

std::string person_label(long index) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "p%08ld", index + 1);
  return buf;
}

Cohort collect(std::vector<std::optional<ObservedRecord>>&& obs, long n_all) {
  Cohort cohort;
  cohort.summary.n_all = n_all;
  for (long i = 0; i < n_all; ++i) {
    if (obs[i]) {
      obs[i]->person_id = person_label(i);
      cohort.records.push_back(std::move(*obs[i]));
    }
  }
  cohort.summary.n = static_cast<long>(cohort.records.size());
  cohort.summary.truncated = n_all - cohort.summary.n;
  cohort.summary.beta_hat =
      n_all > 0 ? static_cast<double>(cohort.summary.n) / static_cast<double>(n_all) : 0.0;
  return cohort;
}

}  // namespace

Cohort sample_cohort_serial(const PiecewiseRateSet& rates, const ObservationScheme& scheme,
                            long n_all, std::uint64_t seed) {
  if (n_all < 0) throw std::invalid_argument("sample_cohort: n_all must be >= 0");
  scheme.validate();
  std::vector<std::optional<ObservedRecord>> obs(static_cast<std::size_t>(n_all));
  for (long i = 0; i < n_all; ++i) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    const double u = sample_entry(scheme.entry_age, rng);
    const Trajectory traj = sample_trajectory(rates, scheme.tau, rng);
    obs[static_cast<std::size_t>(i)] = observe(traj, u, scheme);
  }
  return collect(std::move(obs), n_all);
}

Cohort sample_cohort(const PiecewiseRateSet& rates, const ObservationScheme& scheme,
                     long n_all, std::uint64_t seed) {
  if (n_all < 0) throw std::invalid_argument("sample_cohort: n_all must be >= 0");
  scheme.validate();
  std::vector<std::optional<ObservedRecord>> obs(static_cast<std::size_t>(n_all));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(effective_threads())
#endif
  for (long i = 0; i < n_all; ++i) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
    const double u = sample_entry(scheme.entry_age, rng);
    const Trajectory traj = sample_trajectory(rates, scheme.tau, rng);
    obs[static_cast<std::size_t>(i)] = observe(traj, u, scheme);
  }
  return collect(std::move(obs), n_all);
}

namespace {

Matrix4 identity4() {
  Matrix4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

Matrix4 generator(const RateSet& rates) {
  Matrix4 q{};
  for (TransitionKind k : kAllTransitions) {
    const int from = index_of(transition_from(k));
    const int to = index_of(transition_to(k));
    q[from][to] = rates[k];
    q[from][from] -= rates[k];
  }
  return q;
}

// One uniformization pass; requires mu * t small enough that
// exp(-mu t) does not underflow (callers scale first).
Matrix4 uniformize(const Matrix4& a, double mu_t) {
  Matrix4 sum = identity4();
  double w = std::exp(-mu_t);
  for (auto& row : sum) {
    for (double& x : row) x *= w;
  }
  Matrix4 power = identity4();
  double cumulative = w;
  for (int k = 1; cumulative < 1.0 - 1e-16 && k < 4096; ++k) {
    power = matmul(power, a);
    w *= mu_t / k;
    cumulative += w;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) sum[i][j] += w * power[i][j];
    }
  }
  return sum;
}

}  // namespace

Matrix4 matmul(const Matrix4& a, const Matrix4& b) {
  Matrix4 c{};
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      const double aik = a[i][k];
      if (aik == 0.0) continue;
      for (int j = 0; j < 4; ++j) c[i][j] += aik * b[k][j];
    }
  }
  return c;
}

Matrix4 transition_matrix(const RateSet& rates, double t) {
  if (!(t >= 0.0)) throw std::domain_error("transition_matrix: t must be >= 0");
  double mu = 0.0;
  for (State h : {State::Healthy, State::Stroke, State::Dementia}) {
    mu = std::max(mu, rates.total_exit_rate(h));
  }
  if (mu * t == 0.0) return identity4();

  // Split so each uniformization pass has a modest Poisson mean, then
  // recombine by squaring; stochastic matrices keep this stable.
  long pieces = 1;
  double mu_t = mu * t;
  while (mu_t > 16.0) {
    mu_t /= 2.0;
    pieces *= 2;
  }
  Matrix4 q = generator(rates);
  Matrix4 a = identity4();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a[i][j] += q[i][j] / mu;
  }
  Matrix4 p = uniformize(a, mu_t);
  while (pieces > 1) {
    p = matmul(p, p);
    pieces /= 2;
  }
  return p;
}

Matrix4 transition_matrix(const PiecewiseRateSet& rates, double t) {
  return transition_matrix(rates, 0.0, t);
}

Matrix4 transition_matrix(const PiecewiseRateSet& rates, double s, double t) {
  if (!(s >= 0.0) || !(t >= s) || t > rates.partition().horizon()) {
    throw std::domain_error("transition_matrix: need 0 <= s <= t <= horizon");
  }
  Matrix4 p = identity4();
  if (t == s) return p;
  const Partition& part = rates.partition();
  for (std::size_t l = 0; l < part.intervals(); ++l) {
    const double lo = std::max(s, part.lower(l));
    const double hi = std::min(t, part.upper(l));
    if (hi <= lo) continue;
    p = matmul(p, transition_matrix(rates.interval_rates(l), hi - lo));
  }
  return p;
}

namespace {

// Composite Simpson on [lo, hi] with an even number of panels.
double simpson(double lo, double hi, int panels, const auto& f) {
  const double h = (hi - lo) / panels;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace

double observation_probability(const PiecewiseRateSet& rates, const ObservationScheme& scheme) {
  scheme.validate();
  const auto survive = [&](double u) {
    if (u == 0.0) return 1.0;
    return 1.0 - transition_matrix(rates, u)[index_of(State::Healthy)][index_of(State::Dead)];
  };
  const EntryAgeDist& dist = scheme.entry_age;
  switch (dist.kind()) {
    case EntryAgeDist::Kind::Degenerate:
      return survive(dist.params()[0]);
    case EntryAgeDist::Kind::Empirical: {
      double sum = 0.0;
      for (double u : dist.params()) sum += survive(u);
      return sum / static_cast<double>(dist.params().size());
    }
    case EntryAgeDist::Kind::Uniform: {
      const double a = dist.params()[0];
      const double b = dist.params()[1];
      // Integrate piecewise: the integrand is smooth inside each
      // partition interval, kinked at breakpoints.
      double integral = 0.0;
      std::vector<double> cuts{a};
      for (double brk : rates.partition().breakpoints()) {
        if (brk > a && brk < b) cuts.push_back(brk);
      }
      cuts.push_back(b);
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        integral += simpson(cuts[i], cuts[i + 1], 32, survive);
      }
      return integral / (b - a);
    }
  }
  throw std::logic_error("observation_probability: unknown distribution kind");
}

}  // namespace ehm
