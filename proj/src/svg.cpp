#include "annulus/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace annulus {

namespace {

constexpr double kW = 640, kH = 420, kPad = 56;

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, r.ptr);
}

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

const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return colors[i % 6];
}

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" + num(kH) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         "<text x=\"" + num(kW / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
         "</text>\n";
}

}  // namespace

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool logx) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto tx = [&](double x) { return logx ? std::log10(x) : x; };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (logx && s.x[i] <= 0)) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 <= 1e-9 * std::max({1.0, std::abs(y0), std::abs(y1)})) {
    // Flat data: centre it instead of stretching rounding noise.
    const double mid = 0.5 * (y0 + y1), half = std::max(0.1 * std::abs(mid), 0.05);
    y0 = mid - half;
    y1 = mid + half;
  }
  auto px = [&](double x) { return kPad + (tx(x) - x0) / (x1 - x0) * (kW - 2 * kPad); };
  auto py = [&](double y) { return kH - kPad - (y - y0) / (y1 - y0) * (kH - 2 * kPad); };

  std::string out = header(title);
  out += "<rect x=\"" + num(kPad) + "\" y=\"" + num(kPad) + "\" width=\"" + num(kW - 2 * kPad) + "\" height=\"" +
         num(kH - 2 * kPad) + "\" fill=\"none\" stroke=\"#888\"/>\n";
  out += "<text x=\"" + num(kW / 2) + "\" y=\"" + num(kH - 16) + "\" text-anchor=\"middle\">" + escape(xlabel) +
         "</text>\n";
  out += "<text x=\"16\" y=\"" + num(kH / 2) + "\" transform=\"rotate(-90 16 " + num(kH / 2) +
         ")\" text-anchor=\"middle\">" + escape(ylabel) + "</text>\n";
  out += "<text x=\"" + num(kPad) + "\" y=\"" + num(kH - kPad + 14) + "\">" + num(logx ? std::pow(10, x0) : x0) +
         "</text>\n";
  out += "<text x=\"" + num(kW - kPad) + "\" y=\"" + num(kH - kPad + 14) + "\" text-anchor=\"end\">" +
         num(logx ? std::pow(10, x1) : x1) + "</text>\n";
  out += "<text x=\"" + num(kPad - 4) + "\" y=\"" + num(kH - kPad) + "\" text-anchor=\"end\">" + num(y0) + "</text>\n";
  out += "<text x=\"" + num(kPad - 4) + "\" y=\"" + num(kPad + 4) + "\" text-anchor=\"end\">" + num(y1) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (logx && s.x[i] <= 0)) continue;
      pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(palette(k)) + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    out += "<text x=\"" + num(kW - kPad - 4) + "\" y=\"" + num(kPad + 16 + 14 * static_cast<double>(k)) +
           "\" text-anchor=\"end\" fill=\"" + palette(k) + "\">" + escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string svg_strip(const std::string& title, const std::vector<Polyline>& lines, Box view) {
  const double sx = (kW - 2 * kPad) / (view.xmax - view.xmin);
  const double st = (kH - 2 * kPad) / (view.tmax - view.tmin);
  const double s = std::min(sx, st);
  auto px = [&](double x) { return kPad + (x - view.xmin) * s; };
  auto py = [&](double t) { return kH - kPad - (t - view.tmin) * s; };
  std::string out = header(title);
  out += "<rect x=\"" + num(px(view.xmin)) + "\" y=\"" + num(py(view.tmax)) + "\" width=\"" +
         num((view.xmax - view.xmin) * s) + "\" height=\"" + num((view.tmax - view.tmin) * s) +
         "\" fill=\"none\" stroke=\"#bbb\"/>\n";
  for (const auto& l : lines) {
    std::string pts;
    for (const auto& p : l.pts) pts += num(px(p.x)) + "," + num(py(p.t)) + " ";
    out += "<polyline fill=\"none\" stroke=\"" + l.color + "\" stroke-width=\"" + num(l.width) + "\" points=\"" +
           pts + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace annulus
