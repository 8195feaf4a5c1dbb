#ifndef APD_SVG_HPP
#define APD_SVG_HPP

// Static SVG plots: point sets, before/after deformation strips, decay profiles.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "apd/apcomplex.hpp"
#include "apd/patterns.hpp"

namespace apd::svg {

namespace detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

inline const char* colour(char tile) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[static_cast<unsigned char>(tile) % 6];
}

inline std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" viewBox=\"0 0 " +
         num(w) + " " + num(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

// One horizontal strip of a 1D sample at height y; tiles coloured by label.
inline void strip(std::ostringstream& os, const PatternSample& p, double lo, double scale, double y, double margin) {
  auto sx = [&](double x) { return margin + (x - lo) * scale; };
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const char* c = p.has_tiles() ? colour(p.tiles()[i]) : "#555555";
    os << "<line x1=\"" << num(sx(p.approx(i))) << "\" y1=\"" << num(y) << "\" x2=\"" << num(sx(p.approx(i + 1)))
       << "\" y2=\"" << num(y) << "\" stroke=\"" << c << "\" stroke-width=\"4\"/>\n";
  }
  for (std::size_t i = 0; i < p.size(); ++i)
    os << "<circle cx=\"" << num(sx(p.approx(i))) << "\" cy=\"" << num(y) << "\" r=\"2\" fill=\"black\"/>\n";
}

}  // namespace detail

/// Point plot; 1D samples are drawn as a coloured strip, 2D as a scatter.
inline std::string point_plot(const PatternSample& p, double width = 1200.0) {
  using detail::num;
  const double margin = 20.0;
  std::ostringstream os;
  if (p.dim() == 1) {
    const double lo = p.window().lo[0].to_double(), hi = p.window().hi[0].to_double();
    const double scale = (width - 2 * margin) / std::max(hi - lo, 1e-9);
    os << detail::header(width, 60.0);
    detail::strip(os, p, lo, scale, 30.0, margin);
  } else {
    const double x0 = p.window().lo[0].to_double(), x1 = p.window().hi[0].to_double();
    const double y0 = p.window().lo[1].to_double(), y1 = p.window().hi[1].to_double();
    const double scale = (width - 2 * margin) / std::max({x1 - x0, y1 - y0, 1e-9});
    const double height = 2 * margin + (y1 - y0) * scale;
    os << detail::header(width, height);
    for (std::size_t i = 0; i < p.size(); ++i)
      os << "<circle cx=\"" << num(margin + (p.approx(i, 0) - x0) * scale) << "\" cy=\""
         << num(height - margin - (p.approx(i, 1) - y0) * scale) << "\" r=\"2\" fill=\"black\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// Source strip above the deformed strip, on a shared x axis.
inline std::string before_after(const PatternSample& before, const PatternSample& after, double width = 1200.0) {
  const double margin = 20.0;
  const double lo = std::min(before.window().lo[0].to_double(), after.window().lo[0].to_double());
  const double hi = std::max(before.window().hi[0].to_double(), after.window().hi[0].to_double());
  const double scale = (width - 2 * margin) / std::max(hi - lo, 1e-9);
  std::ostringstream os;
  os << detail::header(width, 110.0);
  os << "<text x=\"" << detail::num(margin) << "\" y=\"14\" font-size=\"11\" font-family=\"sans-serif\">before</text>\n";
  detail::strip(os, before, lo, scale, 30.0, margin);
  os << "<text x=\"" << detail::num(margin) << "\" y=\"64\" font-size=\"11\" font-family=\"sans-serif\">after</text>\n";
  detail::strip(os, after, lo, scale, 80.0, margin);
  os << "</svg>\n";
  return os.str();
}

/// sup|value| against r on a log y axis; zero rows are skipped.
inline std::string decay_plot(const std::vector<DecayRow>& rows, double width = 600.0, double height = 400.0) {
  using detail::num;
  const double margin = 40.0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : rows)
    if (row.sup > 0) pts.emplace_back(row.radius.to_double(), std::log10(row.sup));
  std::ostringstream os;
  os << detail::header(width, height);
  os << "<line x1=\"" << num(margin) << "\" y1=\"" << num(height - margin) << "\" x2=\"" << num(width - margin)
     << "\" y2=\"" << num(height - margin) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(margin) << "\" y1=\"" << num(margin) << "\" x2=\"" << num(margin) << "\" y2=\""
     << num(height - margin) << "\" stroke=\"black\"/>\n";
  if (!pts.empty()) {
    double xmin = pts.front().first, xmax = xmin, ymin = pts.front().second, ymax = ymin;
    for (auto [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
    const double sx = (width - 2 * margin) / std::max(xmax - xmin, 1e-9);
    const double sy = (height - 2 * margin) / std::max(ymax - ymin, 1e-9);
    std::string path;
    for (auto [x, y] : pts) {
      const double px = margin + (x - xmin) * sx, py = height - margin - (y - ymin) * sy;
      path += (path.empty() ? "M" : " L") + num(px) + " " + num(py);
      os << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    }
    os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"#1f77b4\"/>\n";
    os << "<text x=\"" << num(margin) << "\" y=\"" << num(margin - 8) << "\" font-size=\"11\" font-family=\"sans-serif\">"
       << "log10 sup, " << num(ymin) << " .. " << num(ymax) << "</text>\n";
    os << "<text x=\"" << num(width - margin) << "\" y=\"" << num(height - 12) << "\" font-size=\"11\" "
       << "text-anchor=\"end\" font-family=\"sans-serif\">r, " << num(xmin) << " .. " << num(xmax) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace apd::svg

#endif  // APD_SVG_HPP
