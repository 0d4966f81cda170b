#include "reloc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reloc/format.hpp"

namespace reloc::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kMargin = 60.0;

std::string num(double x) { return format_real(x, 6); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series) {
  const double height = 420.0;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); };
  auto py = [&](double y) { return height - kMargin - (y - y0) / (y1 - y0) * (height - 2 * kMargin); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
  o << "<line x1=\"" << kMargin << "\" y1=\"" << height - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
    << height - kMargin << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << height - kMargin
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << num(px(xv)) << "\" y=\"" << height - kMargin + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
      << num(xv) << "</text>\n";
    o << "<text x=\"" << kMargin - 4 << "\" y=\"" << num(py(yv) + 3) << "\" text-anchor=\"end\" font-size=\"10\">"
      << num(yv) << "</text>\n";
  }
  o << "<text x=\"" << kWidth / 2 << "\" y=\"" << height - 14 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << escape(x_label) << "</text>\n";
  o << "<text x=\"14\" y=\"" << height / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << height / 2
    << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  double legend_y = kMargin;
  for (const auto& s : series) {
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    }
    o << "\"/>\n";
    o << "<text x=\"" << kWidth - kMargin - 150 << "\" y=\"" << legend_y << "\" font-size=\"11\" fill=\"" << s.color
      << "\">" << escape(s.label) << "</text>\n";
    legend_y += 14;
  }
  o << "</svg>\n";
  return o.str();
}

std::string histogram_panels(const std::string& title, const std::vector<Histogram>& panels, double lo, double hi,
                             std::size_t bins, double marker) {
  const double panel_h = 110.0;
  const double height = 40.0 + panel_h * static_cast<double>(panels.size()) + 30.0;
  auto px = [&](double x) { return kMargin + (x - lo) / (hi - lo) * (kWidth - 2 * kMargin); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const double base = 40.0 + panel_h * static_cast<double>(p + 1) - 10.0;
    std::vector<double> counts(bins, 0.0);
    for (double x : panels[p].samples) {
      if (x < lo || x > hi) continue;
      const auto b = std::min(bins - 1, static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins)));
      counts[b] += 1.0;
    }
    const double top = std::max(1.0, *std::max_element(counts.begin(), counts.end()));
    const double bw = (kWidth - 2 * kMargin) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      const double h = counts[b] / top * (panel_h - 30.0);
      o << "<rect x=\"" << num(kMargin + bw * static_cast<double>(b)) << "\" y=\"" << num(base - h) << "\" width=\""
        << num(bw) << "\" height=\"" << num(h) << "\" fill=\"steelblue\"/>\n";
    }
    o << "<line x1=\"" << kMargin << "\" y1=\"" << base << "\" x2=\"" << kWidth - kMargin << "\" y2=\"" << base
      << "\" stroke=\"black\"/>\n";
    if (marker >= lo && marker <= hi) {
      o << "<line x1=\"" << num(px(marker)) << "\" y1=\"" << base - panel_h + 30 << "\" x2=\"" << num(px(marker))
        << "\" y2=\"" << base << "\" stroke=\"crimson\" stroke-dasharray=\"4 3\"/>\n";
    }
    o << "<text x=\"" << kMargin << "\" y=\"" << base - panel_h + 24 << "\" font-size=\"11\">" << escape(panels[p].label)
      << "</text>\n";
  }
  const double axis_y = 40.0 + panel_h * static_cast<double>(panels.size()) + 6.0;
  for (int k = 0; k <= 4; ++k) {
    const double xv = lo + (hi - lo) * k / 4.0;
    o << "<text x=\"" << num(px(xv)) << "\" y=\"" << axis_y << "\" text-anchor=\"middle\" font-size=\"10\">" << num(xv)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace reloc::svg
