#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ehm/rates.hpp"
#include "ehm/rng.hpp"
#include "ehm/states.hpp"

namespace ehm {
class Rng;

// One latent state history starting in Healthy at t = 0 (age 50).
// Jump times are strictly increasing in (0, tau]; "alive at tau" is
// simply the absence of a jump to Dead.
struct Jump {
  double time;
  State to;
};

struct Trajectory {
  std::vector<Jump> jumps;
  double horizon = 0.0;

  // Cadlag state: value after any jump at exactly t.
  State state_at(double t) const;
  std::optional<double> death_time() const;
};

Trajectory sample_trajectory(const PiecewiseRateSet& rates, double tau, Rng& rng);

struct ObservedEvent {
  double age;
  State to;
};

struct Episode {
  double start;
  double stop;
  State state;  // never Dead
};

// Post-truncation, window-censored view of one person.
struct ObservedRecord {
  std::string person_id;
  double entry_age = 0.0;
  State entry_state = State::Healthy;
  double exit_age = 0.0;  // min(death age, entry + window, early exit)
  std::vector<ObservedEvent> events;

  // Episodes tiling (entry_age, exit_age]; if death is observed the final
  // episode ends at the death age in the pre-death state.
  std::vector<Episode> episodes() const;
  std::optional<double> death_age() const;
};

// Returns nullopt iff the trajectory is dead at u (left-truncated).
std::optional<ObservedRecord> observe(const Trajectory& traj, double u,
                                      const ObservationScheme& scheme);

struct CohortSummary {
  long n_all = 0;
  long n = 0;
  long truncated = 0;
  double beta_hat = 0.0;  // n / n_all
};

struct Cohort {
  std::vector<ObservedRecord> records;
  CohortSummary summary;
};

// n_all independent (trajectory, U) pairs; person i gets the substream
// (seed, i) so results are byte-identical for any thread count.
Cohort sample_cohort(const PiecewiseRateSet& rates, const ObservationScheme& scheme,
                     long n_all, std::uint64_t seed);
Cohort sample_cohort_serial(const PiecewiseRateSet& rates, const ObservationScheme& scheme,
                            long n_all, std::uint64_t seed);

// 4x4 transition probability matrix P_{hk}(s, t) = P(X_t = k | X_s = h),
// computed exactly by uniformization (per partition interval).
using Matrix4 = std::array<std::array<double, 4>, 4>;

Matrix4 matmul(const Matrix4& a, const Matrix4& b);
Matrix4 transition_matrix(const RateSet& rates, double t);
Matrix4 transition_matrix(const PiecewiseRateSet& rates, double t);
Matrix4 transition_matrix(const PiecewiseRateSet& rates, double s, double t);

// beta = P(X_U != d), by quadrature over the entry-age distribution.
double observation_probability(const PiecewiseRateSet& rates, const ObservationScheme& scheme);

}  // namespace ehm
