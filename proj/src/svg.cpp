#include "galton/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "galton/errors.hpp"

namespace galton {

namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kLeft = 72.0, kRight = 24.0, kTop = 48.0, kBottom = 56.0;

const char* kPalette[6] = {"#26547c", "#ef476f", "#06d6a0",
                           "#f4a261", "#5f0f40", "#118ab2"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

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

// round the axis range outward to pleasant tick positions
std::vector<double> ticks_for(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-9 * span; t += step) {
    if (std::abs(t) < 1e-12 * span) t = 0.0;
    ticks.push_back(t);
  }
  return ticks;
}

}  // namespace

std::string render_line_plot(const std::vector<PlotSeries>& series,
                             const std::string& title,
                             const std::string& x_label,
                             const std::string& y_label) {
  bool any = false;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw InvalidConfig("plot series x/y lengths differ");
    if (!s.x.empty()) any = true;
  }
  if (!any) throw EmptySeries("no points to plot");

  double x_lo = 1e308, x_hi = -1e308, y_lo = 1e308, y_hi = -1e308;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  if (x_hi <= x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi <= y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  const double y_pad = 0.06 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  const double px = kWidth - kLeft - kRight;
  const double py = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * px; };
  auto sy = [&](double y) {
    return kTop + py - (y - y_lo) / (y_hi - y_lo) * py;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
     << kHeight << "\">\n";
  os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"#ffffff\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << escape(title) << "</text>\n";

  // frame
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << px
     << "\" height=\"" << py
     << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  for (double t : ticks_for(x_lo, x_hi)) {
    const double gx = sx(t);
    os << "<line x1=\"" << num(gx) << "\" y1=\"" << kTop + py << "\" x2=\""
       << num(gx) << "\" y2=\"" << kTop + py + 5
       << "\" stroke=\"#333333\"/>\n";
    os << "<text x=\"" << num(gx) << "\" y=\"" << kTop + py + 20
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << num(t) << "</text>\n";
  }
  for (double t : ticks_for(y_lo, y_hi)) {
    const double gy = sy(t);
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(gy) << "\" x2=\""
       << kLeft << "\" y2=\"" << num(gy) << "\" stroke=\"#333333\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(gy + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << num(t) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + px / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">"
     << escape(x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << kTop + py / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\" transform=\"rotate(-90 18 "
     << kTop + py / 2 << ")\">" << escape(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.x.empty()) continue;
    const char* color = kPalette[si % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) os << ' ';
      os << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
    }
    os << "\"/>\n";
    if (!s.label.empty()) {
      const double ly = kTop + 16 + 18 * static_cast<double>(si);
      os << "<line x1=\"" << kLeft + px - 150 << "\" y1=\"" << num(ly - 4)
         << "\" x2=\"" << kLeft + px - 126 << "\" y2=\"" << num(ly - 4)
         << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
      os << "<text x=\"" << kLeft + px - 120 << "\" y=\"" << num(ly)
         << "\" font-family=\"sans-serif\" font-size=\"11\">"
         << escape(s.label) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace galton
