#include "ensemblekit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ensemblekit::svg {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double x, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string tick_label(double x) {
  const double a = std::abs(x);
  if (a != 0.0 && (a < 1e-2 || a >= 1e4)) return fmt(x, "%.1e");
  return fmt(x, "%.3g");
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series) {
  constexpr double W = 720, H = 460, L = 80, R = 190, T = 50, B = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0, yv = y0 + (y1 - y0) * i / 5.0;
    os << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << H - B << "\" x2=\"" << fmt(px(xv)) << "\" y2=\"" << H - B + 5
       << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << tick_label(xv)
       << "</text>\n";
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << W - R << "\" y2=\"" << fmt(py(yv))
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << L - 8 << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">" << tick_label(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << escape(x_label)
     << "</text>\n";
  os << "<text transform=\"translate(20," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    std::ostringstream pts;
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (s.steps && !first) pts << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i - 1])) << ' ';
      pts << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
      first = false;
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"" << pts.str() << "\"/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          os << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"3\" fill=\"" << color
             << "\"/>\n";
    const double ly = T + 14 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 32 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R + 38 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string table(const std::string& title, const std::vector<std::string>& header,
                  const std::vector<std::vector<Cell>>& rows) {
  constexpr double row_h = 22, top = 50, left = 10;
  std::vector<double> widths(header.size(), 60.0);
  for (std::size_t c = 0; c < header.size(); ++c) {
    widths[c] = std::max(widths[c], 7.5 * static_cast<double>(header[c].size()) + 16);
    for (const auto& r : rows)
      if (c < r.size()) widths[c] = std::max(widths[c], 7.5 * static_cast<double>(r[c].text.size()) + 16);
  }
  double total = left * 2;
  for (double w : widths) total += w;
  const double height = top + row_h * static_cast<double>(rows.size() + 1) + 20;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total << "\" height=\"" << height
     << "\" font-family=\"monospace\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left << "\" y=\"28\" font-family=\"sans-serif\" font-size=\"15\">" << escape(title)
     << "</text>\n";
  auto draw_row = [&](double y, const std::vector<Cell>& cells, bool bold) {
    double x = left;
    for (std::size_t c = 0; c < widths.size(); ++c) {
      const Cell cell = c < cells.size() ? cells[c] : Cell{};
      const char* fill = cell.state > 0 ? "#d8f0d8" : cell.state < 0 ? "#f6d0d0" : (bold ? "#e8e8e8" : "white");
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << widths[c] << "\" height=\"" << row_h
         << "\" fill=\"" << fill << "\" stroke=\"#999\"/>\n";
      os << "<text x=\"" << x + 6 << "\" y=\"" << y + 15 << "\"" << (bold ? " font-weight=\"bold\"" : "") << ">"
         << escape(cell.text) << "</text>\n";
      x += widths[c];
    }
  };
  std::vector<Cell> head;
  for (const auto& h : header) head.push_back({h, 0});
  draw_row(top, head, true);
  for (std::size_t r = 0; r < rows.size(); ++r) draw_row(top + row_h * static_cast<double>(r + 1), rows[r], false);
  os << "</svg>\n";
  return os.str();
}

}  // namespace ensemblekit::svg
