#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "feti_lab/report.hpp"

namespace feti_lab {

struct LogLogPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> guide_slopes;  // dashed reference lines through the first point
};

/// Minimal SVG scatter on log-log axes with decade ticks.
inline void write_svg(std::ostream& os, const LogLogPlot& plot) {
  constexpr double width = 640, height = 480, left = 80, right = 30, top = 50, bottom = 60;
  if (plot.x.empty() || plot.x.size() != plot.y.size()) return;

  const auto [xmin_it, xmax_it] = std::minmax_element(plot.x.begin(), plot.x.end());
  const auto [ymin_it, ymax_it] = std::minmax_element(plot.y.begin(), plot.y.end());
  double lx0 = std::log10(*xmin_it), lx1 = std::log10(*xmax_it);
  double ly0 = std::log10(*ymin_it), ly1 = std::log10(*ymax_it);
  const double px = std::max(0.1, 0.1 * (lx1 - lx0)), py = std::max(0.1, 0.1 * (ly1 - ly0));
  lx0 -= px, lx1 += px, ly0 -= py, ly1 += py;

  const auto sx = [&](double v) { return left + (std::log10(v) - lx0) / (lx1 - lx0) * (width - left - right); };
  const auto sy = [&](double v) { return height - bottom - (std::log10(v) - ly0) / (ly1 - ly0) * (height - top - bottom); };
  const auto num = [](double v) { return format_number(v); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"25\" text-anchor=\"middle\" font-size=\"15\">" << plot.title << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
     << height - bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
     << "\" stroke=\"black\"/>\n";

  for (int d = static_cast<int>(std::floor(lx0)); d <= static_cast<int>(std::ceil(lx1)); ++d) {
    for (int mult = 1; mult < 10; ++mult) {
      const double v = mult * std::pow(10.0, d);
      if (std::log10(v) < lx0 || std::log10(v) > lx1) continue;
      const double x = sx(v);
      os << "<line x1=\"" << num(x) << "\" y1=\"" << height - bottom << "\" x2=\"" << num(x) << "\" y2=\""
         << height - bottom + (mult == 1 ? 8 : 4) << "\" stroke=\"black\"/>\n";
      if (mult == 1 || mult == 2 || mult == 5)
        os << "<text x=\"" << num(x) << "\" y=\"" << height - bottom + 22 << "\" text-anchor=\"middle\">" << num(v)
           << "</text>\n";
    }
  }
  for (int d = static_cast<int>(std::floor(ly0)); d <= static_cast<int>(std::ceil(ly1)); ++d) {
    for (int mult = 1; mult < 10; ++mult) {
      const double v = mult * std::pow(10.0, d);
      if (std::log10(v) < ly0 || std::log10(v) > ly1) continue;
      const double y = sy(v);
      os << "<line x1=\"" << left - (mult == 1 ? 8 : 4) << "\" y1=\"" << num(y) << "\" x2=\"" << left << "\" y2=\""
         << num(y) << "\" stroke=\"black\"/>\n";
      if (mult == 1 || mult == 2 || mult == 5)
        os << "<text x=\"" << left - 10 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
    }
  }
  os << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
     << plot.x_label << "</text>\n";
  os << "<text x=\"20\" y=\"" << (top + height - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << (top + height - bottom) / 2 << ")\">" << plot.y_label << "</text>\n";

  for (double slope : plot.guide_slopes) {
    const double x0 = plot.x.front(), y0 = plot.y.front(), x1 = *xmax_it;
    const double y1 = y0 * std::pow(x1 / x0, slope);
    os << "<line x1=\"" << num(sx(x0)) << "\" y1=\"" << num(sy(y0)) << "\" x2=\"" << num(sx(x1)) << "\" y2=\""
       << num(sy(y1)) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << num(sx(x1) - 4) << "\" y=\"" << num(sy(y1) - 6) << "\" text-anchor=\"end\" fill=\"gray\">slope "
       << num(slope) << "</text>\n";
  }
  for (std::size_t i = 0; i < plot.x.size(); ++i)
    os << "<circle cx=\"" << num(sx(plot.x[i])) << "\" cy=\"" << num(sy(plot.y[i])) << "\" r=\"4\" fill=\"steelblue\"/>\n";
  os << "</svg>\n";
}

}  // namespace feti_lab
