#include <doctest.h>

#include <stdexcept>

#include <string>

#include "ehm/aggregate.hpp"
#include "ehm/estimate.hpp"
#include "ehm/svg.hpp"

using namespace ehm;

namespace {

FitResult demo_piecewise_fit() {
  IntervalAggregates ia(Partition({0.0, 30.0, 35.0, 40.0, 63.0}));
  auto set_cell = [&](std::size_t l, TransitionKind k, long n, double e) {
    ia.cells[l].counts[index_of(k)] = n;
    ia.cells[l].exposures[index_of(transition_from(k))] = e;
  };
  set_cell(0, TransitionKind::StrokeToDementia, 1584, 18496.0);
  set_cell(0, TransitionKind::HealthyToDementia, 9151, 188161.0);
  set_cell(1, TransitionKind::StrokeToDementia, 1138, 10101.0);
  set_cell(1, TransitionKind::HealthyToDementia, 7087, 87106.0);
  // interval 2 left empty on purpose: NA -> gap
  set_cell(3, TransitionKind::StrokeToDementia, 122, 716.0);
  set_cell(3, TransitionKind::HealthyToDementia, 963, 5816.0);
  return fit_piecewise(ia);
}

}  // namespace

TEST_CASE("step plot renders both curves in calendar age") {
  const FitResult fit = demo_piecewise_fit();
  const std::string svg = render_step_plot(fit, TransitionKind::StrokeToDementia,
                                           TransitionKind::HealthyToDementia, 0.95);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
  // both legend labels present
  CHECK(svg.find(">S1-D<") != std::string::npos);
  CHECK(svg.find(">H-D<") != std::string::npos);
  // dashed CI bands present
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  // calendar-age axis labels (50 + t): partition runs to 63 -> age 113
  CHECK(svg.find(">50<") != std::string::npos);
  CHECK(svg.find(">110<") != std::string::npos);

  // the NA interval leaves a gap: fewer solid segments than intervals
  // (3 drawn segments per curve, not 4)
  std::size_t grey_lines = 0;
  for (std::size_t pos = svg.find("stroke='grey' stroke-width='2'"); pos != std::string::npos;
       pos = svg.find("stroke='grey' stroke-width='2'", pos + 1)) {
    ++grey_lines;
  }
  // 3 segments + 1 connector (between the two contiguous drawn intervals)
  // + 1 legend swatch
  CHECK(grey_lines == 5);
}

TEST_CASE("plot refuses non-piecewise and single-interval fits") {
  Aggregates agg;
  agg.counts[index_of(TransitionKind::HealthyToDementia)] = 10;
  agg.exposures[index_of(State::Healthy)] = 100.0;
  const FitResult hom = fit_homogeneous(agg, 63.0);
  CHECK_THROWS_AS(render_step_plot(hom, TransitionKind::StrokeToDementia,
                                   TransitionKind::HealthyToDementia, 0.95),
                  std::invalid_argument);

  IntervalAggregates ia(Partition::trivial(63.0));
  ia.cells[0] = agg;
  const FitResult single = fit_piecewise(ia);
  CHECK_THROWS_AS(render_step_plot(single, TransitionKind::StrokeToDementia,
                                   TransitionKind::HealthyToDementia, 0.95),
                  std::invalid_argument);
}
