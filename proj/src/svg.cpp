#include "klmap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace klmap {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 50.0;

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Series {
  const char* label;
  const char* color;
  std::vector<std::pair<double, double>> points;  // (index position, value)
};

std::string polyline(const Series& s, double x0, double plot_w, double n_max_index,
                     double y_lo, double y_hi) {
  std::ostringstream out;
  out << "  <polyline fill=\"none\" stroke=\"" << s.color
      << "\" stroke-width=\"1.5\" points=\"";
  for (const auto& [pos, value] : s.points) {
    const double px = x0 + plot_w * (n_max_index > 0 ? pos / n_max_index : 0.5);
    const double frac = (std::log10(value) - y_lo) / (y_hi - y_lo);
    const double py = kMarginTop + (kHeight - kMarginTop - kMarginBottom) * (1.0 - frac);
    out << coord(px) << ',' << coord(py) << ' ';
  }
  out << "\"/>\n";
  return out.str();
}

}  // namespace

std::string bounds_convergence_svg(const std::vector<BoundReport>& reports) {
  Series err{"err_x", "#1f6fb2", {}};
  Series bound{"bound_x", "#c44e52", {}};
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].err_x > 0.0) err.points.emplace_back(double(i), reports[i].err_x);
    if (reports[i].bound_x > 0.0) bound.points.emplace_back(double(i), reports[i].bound_x);
  }

  double lo = 0.0, hi = 1.0;
  bool have_data = !err.points.empty() || !bound.points.empty();
  if (have_data) {
    lo = 1e300;
    hi = -1e300;
    for (const Series* s : {&err, &bound}) {
      for (const auto& [pos, v] : s->points) {
        lo = std::min(lo, std::log10(v));
        hi = std::max(hi, std::log10(v));
      }
    }
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1.0;
  }

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const double n_max_index = reports.empty() ? 1.0 : double(reports.size() - 1);

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <text x=\"" << coord(kWidth / 2)
      << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
         "truncation error and bound vs n</text>\n";

  // axes
  const double x_axis_y = kHeight - kMarginBottom;
  out << "  <line x1=\"" << coord(kMarginLeft) << "\" y1=\"" << coord(x_axis_y)
      << "\" x2=\"" << coord(kWidth - kMarginRight) << "\" y2=\"" << coord(x_axis_y)
      << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << coord(kMarginLeft) << "\" y1=\"" << coord(kMarginTop)
      << "\" x2=\"" << coord(kMarginLeft) << "\" y2=\"" << coord(x_axis_y)
      << "\" stroke=\"black\"/>\n";

  // x ticks at each report, labeled with n
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double px = kMarginLeft + plot_w * (n_max_index > 0 ? double(i) / n_max_index : 0.5);
    out << "  <line x1=\"" << coord(px) << "\" y1=\"" << coord(x_axis_y) << "\" x2=\""
        << coord(px) << "\" y2=\"" << coord(x_axis_y + 5) << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << coord(px) << "\" y=\"" << coord(x_axis_y + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << reports[i].n << "</text>\n";
  }
  out << "  <text x=\"" << coord(kMarginLeft + plot_w / 2) << "\" y=\""
      << coord(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">n</text>\n";

  // y ticks at integer decades
  if (have_data) {
    const int n_decades = static_cast<int>(hi - lo);
    const int stride = std::max(1, n_decades / 8);
    for (int dec = 0; dec <= n_decades; dec += stride) {
      const double frac = double(dec) / (hi - lo);
      const double py = kMarginTop + plot_h * (1.0 - frac);
      out << "  <line x1=\"" << coord(kMarginLeft - 5) << "\" y1=\"" << coord(py)
          << "\" x2=\"" << coord(kMarginLeft) << "\" y2=\"" << coord(py)
          << "\" stroke=\"black\"/>\n";
      out << "  <text x=\"" << coord(kMarginLeft - 9) << "\" y=\"" << coord(py + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e"
          << static_cast<int>(lo) + dec << "</text>\n";
    }
    out << polyline(err, kMarginLeft, plot_w, n_max_index, lo, hi);
    out << polyline(bound, kMarginLeft, plot_w, n_max_index, lo, hi);
  }

  // legend
  const double lx = kWidth - kMarginRight - 140.0;
  out << "  <line x1=\"" << coord(lx) << "\" y1=\"" << coord(kMarginTop + 10) << "\" x2=\""
      << coord(lx + 24) << "\" y2=\"" << coord(kMarginTop + 10) << "\" stroke=\""
      << err.color << "\" stroke-width=\"1.5\"/>\n";
  out << "  <text x=\"" << coord(lx + 30) << "\" y=\"" << coord(kMarginTop + 14)
      << "\" font-family=\"sans-serif\" font-size=\"12\">err_x</text>\n";
  out << "  <line x1=\"" << coord(lx) << "\" y1=\"" << coord(kMarginTop + 28) << "\" x2=\""
      << coord(lx + 24) << "\" y2=\"" << coord(kMarginTop + 28) << "\" stroke=\""
      << bound.color << "\" stroke-width=\"1.5\"/>\n";
  out << "  <text x=\"" << coord(lx + 30) << "\" y=\"" << coord(kMarginTop + 32)
      << "\" font-family=\"sans-serif\" font-size=\"12\">bound_x</text>\n";

  out << "</svg>\n";
  return out.str();
}

}  // namespace klmap
