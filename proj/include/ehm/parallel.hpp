#pragma once

namespace ehm {

// Worker count: min(omp_get_max_threads(), EHE_THREADS) when the
// environment variable is set; 1 without OpenMP.
int effective_threads();

}  // namespace ehm
