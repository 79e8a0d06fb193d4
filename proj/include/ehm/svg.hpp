#pragma once

#include <string>

#include "ehm/estimate.hpp"

namespace ehm {

// Step plot of two piecewise intensity estimates over calendar age
// (50 + t) with dashed pointwise Wald bands; NA intervals are gaps.
// Throws std::invalid_argument for non-piecewise fits and for fits with a
// single interval.
std::string render_step_plot(const FitResult& fit, TransitionKind top, TransitionKind bottom,
                             double level);

}  // namespace ehm
