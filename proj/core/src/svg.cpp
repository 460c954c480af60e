#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ergolab/svg.hpp"

namespace ergolab {

namespace {

constexpr int kW = 640;
constexpr int kH = 420;
constexpr int kPad = 56;
const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

void header(std::ostringstream& out, const std::optional<std::string>& stamp, int w, int h) {
  if (stamp) out << "<!-- generated " << escape(*stamp) << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string svg_line_plot(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::optional<std::string>& stamp) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return kPad + (x - x0) / (x1 - x0) * (kW - 2 * kPad); };
  auto py = [&](double y) { return kH - kPad - (y - y0) / (y1 - y0) * (kH - 2 * kPad); };

  std::ostringstream out;
  header(out, stamp, kW, kH);
  out << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
  out << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kW - 2 * kPad << "\" height=\""
      << kH - 2 * kPad << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    double xv = x0 + (x1 - x0) * t / 4.0;
    double yv = y0 + (y1 - y0) * t / 4.0;
    out << "<text x=\"" << num(px(xv)) << "\" y=\"" << kH - kPad + 16 << "\" text-anchor=\"middle\">" << tick(xv)
        << "</text>\n";
    out << "<text x=\"" << kPad - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">" << escape(x_label)
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << kH / 2
      << ")\">" << escape(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kColours[k % 6];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << kW - kPad - 4 << "\" y=\"" << kPad + 16 + 14 * static_cast<int>(k)
        << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_heat_map(const std::vector<double>& values, int rows, int cols, const std::string& title,
                         const std::optional<std::string>& stamp) {
  if (rows <= 0 || cols <= 0 || values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    return {};
  }
  double lo = INFINITY, hi = -INFINITY;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double cell = std::max(1.0, 512.0 / std::max(rows, cols));
  const int w = static_cast<int>(cell * cols) + 2 * kPad;
  const int h = static_cast<int>(cell * rows) + 2 * kPad;
  std::ostringstream out;
  header(out, stamp, w, h);
  out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << " (min " << tick(lo) << ", max " << tick(hi) << ")</text>\n";
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double v = values[static_cast<std::size_t>(r) * cols + c];
      int shade = std::isfinite(v) ? static_cast<int>(std::lround(255.0 * (v - lo) / (hi - lo))) : 0;
      out << "<rect x=\"" << num(kPad + c * cell) << "\" y=\"" << num(h - kPad - (r + 1) * cell) << "\" width=\""
          << num(cell) << "\" height=\"" << num(cell) << "\" fill=\"rgb(" << shade << ',' << shade / 2 << ','
          << 255 - shade << ")\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ergolab
