#pragma once

#include <cstdint>
#include <optional>

#include "ehm/rates.hpp"

namespace ehm {

// One simulation / study configuration: true rates, observation scheme,
// latent sample size, seed, and replication count for Monte Carlo runs.
struct RunConfig {
  PiecewiseRateSet rates = PiecewiseRateSet::homogeneous(RateSet{}, 63.0);
  ObservationScheme scheme;
  long n_all = 0;
  std::uint64_t seed = 0;
  int replications = 1;

  void validate() const;
};

}  // namespace ehm
