#include "ehm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ehm/inference.hpp"

namespace ehm {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 20.0;
constexpr double kMarginBottom = 50.0;
constexpr double kBaseAge = 50.0;

struct Scale {
  double x0, x1, y1;  // data range (y0 fixed at 0)

  double x(double age) const {
    return kMarginLeft + (age - x0) / (x1 - x0) * (kWidth - kMarginLeft - kMarginRight);
  }
  double y(double v) const {
    return kHeight - kMarginBottom - v / y1 * (kHeight - kMarginTop - kMarginBottom);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Segment {
  double lo, hi;      // calendar ages
  double est, ci_lo, ci_hi;
};

std::vector<Segment> segments_for(const FitResult& fit, TransitionKind k, double level) {
  std::vector<Segment> segs;
  for (std::size_t l = 0; l < fit.partition->intervals(); ++l) {
    const ParamFit& cell = fit.at(k, l);
    if (cell.status == CellStatus::NoExposure) continue;  // rendered as a gap
    const auto [lo, hi] = wald_ci(cell, level);
    segs.push_back({kBaseAge + cell.interval_lo, kBaseAge + cell.interval_hi, cell.estimate,
                    std::max(lo, 0.0) == lo ? lo : lo, hi});
  }
  return segs;
}

void draw_steps(std::ostringstream& out, const std::vector<Segment>& segs, const Scale& sc,
                const std::string& color) {
  // Solid point-estimate steps.
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& s = segs[i];
    out << "<line x1='" << fmt(sc.x(s.lo)) << "' y1='" << fmt(sc.y(s.est)) << "' x2='"
        << fmt(sc.x(s.hi)) << "' y2='" << fmt(sc.y(s.est)) << "' stroke='" << color
        << "' stroke-width='2'/>\n";
    if (i + 1 < segs.size() && segs[i + 1].lo == s.hi) {
      out << "<line x1='" << fmt(sc.x(s.hi)) << "' y1='" << fmt(sc.y(s.est)) << "' x2='"
          << fmt(sc.x(s.hi)) << "' y2='" << fmt(sc.y(segs[i + 1].est)) << "' stroke='" << color
          << "' stroke-width='2'/>\n";
    }
  }
  // Dashed confidence bands.
  for (const Segment& s : segs) {
    for (double v : {s.ci_lo, s.ci_hi}) {
      out << "<line x1='" << fmt(sc.x(s.lo)) << "' y1='" << fmt(sc.y(v)) << "' x2='"
          << fmt(sc.x(s.hi)) << "' y2='" << fmt(sc.y(v)) << "' stroke='" << color
          << "' stroke-width='1' stroke-dasharray='5,4'/>\n";
    }
  }
}

}  // namespace

std::string render_step_plot(const FitResult& fit, TransitionKind top, TransitionKind bottom,
                             double level) {
  if (fit.model != FitResult::Model::Piecewise || !fit.partition) {
    throw std::invalid_argument("render_step_plot: piecewise fit required (use --partition)");
  }
  if (fit.partition->intervals() < 2) {
    throw std::invalid_argument("render_step_plot: more than one interval required");
  }
  const auto top_segs = segments_for(fit, top, level);
  const auto bottom_segs = segments_for(fit, bottom, level);

  Scale sc;
  sc.x0 = kBaseAge;
  sc.x1 = kBaseAge + fit.partition->horizon();
  sc.y1 = 0.0;
  for (const auto* segs : {&top_segs, &bottom_segs}) {
    for (const Segment& s : *segs) sc.y1 = std::max(sc.y1, s.ci_hi);
  }
  if (sc.y1 <= 0.0) sc.y1 = 1.0;
  sc.y1 *= 1.05;

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
      << "' viewBox='0 0 " << kWidth << ' ' << kHeight << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";

  // Axes.
  out << "<line x1='" << fmt(kMarginLeft) << "' y1='" << fmt(sc.y(0.0)) << "' x2='"
      << fmt(kWidth - kMarginRight) << "' y2='" << fmt(sc.y(0.0)) << "' stroke='black'/>\n";
  out << "<line x1='" << fmt(kMarginLeft) << "' y1='" << fmt(kMarginTop) << "' x2='"
      << fmt(kMarginLeft) << "' y2='" << fmt(sc.y(0.0)) << "' stroke='black'/>\n";
  for (double age = sc.x0; age <= sc.x1 + 1e-9; age += 10.0) {
    out << "<line x1='" << fmt(sc.x(age)) << "' y1='" << fmt(sc.y(0.0)) << "' x2='"
        << fmt(sc.x(age)) << "' y2='" << fmt(sc.y(0.0) + 5.0) << "' stroke='black'/>\n";
    out << "<text x='" << fmt(sc.x(age)) << "' y='" << fmt(sc.y(0.0) + 20.0)
        << "' font-size='12' text-anchor='middle'>" << fmt(age) << "</text>\n";
  }
  const double ytick = sc.y1 / 5.0;
  for (int i = 0; i <= 5; ++i) {
    const double v = i * ytick;
    out << "<line x1='" << fmt(kMarginLeft - 5.0) << "' y1='" << fmt(sc.y(v)) << "' x2='"
        << fmt(kMarginLeft) << "' y2='" << fmt(sc.y(v)) << "' stroke='black'/>\n";
    out << "<text x='" << fmt(kMarginLeft - 8.0) << "' y='" << fmt(sc.y(v) + 4.0)
        << "' font-size='12' text-anchor='end'>" << fmt(v) << "</text>\n";
  }
  out << "<text x='" << fmt((kMarginLeft + kWidth - kMarginRight) / 2.0) << "' y='"
      << fmt(kHeight - 12.0) << "' font-size='13' text-anchor='middle'>age (years)</text>\n";
  out << "<text x='16' y='" << fmt((kMarginTop + kHeight - kMarginBottom) / 2.0)
      << "' font-size='13' text-anchor='middle' transform='rotate(-90 16 "
      << fmt((kMarginTop + kHeight - kMarginBottom) / 2.0)
      << ")'>intensity (per person-year)</text>\n";

  draw_steps(out, top_segs, sc, "grey");
  draw_steps(out, bottom_segs, sc, "black");

  // Legend.
  out << "<line x1='" << fmt(kMarginLeft + 14.0) << "' y1='" << fmt(kMarginTop + 12.0)
      << "' x2='" << fmt(kMarginLeft + 44.0) << "' y2='" << fmt(kMarginTop + 12.0)
      << "' stroke='grey' stroke-width='2'/>\n";
  out << "<text x='" << fmt(kMarginLeft + 50.0) << "' y='" << fmt(kMarginTop + 16.0)
      << "' font-size='12'>" << transition_code(top) << "</text>\n";
  out << "<line x1='" << fmt(kMarginLeft + 14.0) << "' y1='" << fmt(kMarginTop + 30.0)
      << "' x2='" << fmt(kMarginLeft + 44.0) << "' y2='" << fmt(kMarginTop + 30.0)
      << "' stroke='black' stroke-width='2'/>\n";
  out << "<text x='" << fmt(kMarginLeft + 50.0) << "' y='" << fmt(kMarginTop + 34.0)
      << "' font-size='12'>" << transition_code(bottom) << "</text>\n";

  out << "</svg>\n";
  return out.str();
}

}  // namespace ehm
