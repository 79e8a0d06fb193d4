#include "ehm/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ehm {

int effective_threads() {
#ifdef _OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif
  if (const char* env = std::getenv("EHE_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap >= 1 && cap < threads) threads = cap;
    } catch (...) {
      // ignore malformed values
    }
  }
  return threads;
}

}  // namespace ehm
