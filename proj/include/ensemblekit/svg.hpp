#pragma once

#include <string>
#include <vector>

namespace ensemblekit::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool steps = false;   // draw as a right-continuous staircase
  bool markers = false;
};

// Self-contained SVG document.
std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

struct Cell {
  std::string text;
  int state = 0;  // 1 satisfied, -1 violated, 0 neutral
};

std::string table(const std::string& title, const std::vector<std::string>& header,
                  const std::vector<std::vector<Cell>>& rows);

}  // namespace ensemblekit::svg
