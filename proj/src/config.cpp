#include "ehm/config.hpp"

#include <cmath>
#include <stdexcept>

namespace ehm {

void RunConfig::validate() const {
  scheme.validate();
  if (rates.partition().horizon() != scheme.tau) {
    throw std::invalid_argument("RunConfig: partition horizon must equal tau");
  }
  if (n_all < 0) throw std::invalid_argument("RunConfig: n_all must be >= 0");
  if (replications < 1) throw std::invalid_argument("RunConfig: replications must be >= 1");
}

}  // namespace ehm
