#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ergolab {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line plot. `stamp` becomes a comment on the first line;
/// pass nothing for byte-stable output.
std::string svg_line_plot(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::optional<std::string>& stamp = std::nullopt);

/// Row-major heat map, rows drawn bottom to top.
std::string svg_heat_map(const std::vector<double>& values, int rows, int cols, const std::string& title,
                         const std::optional<std::string>& stamp = std::nullopt);

}  // namespace ergolab
