#include "cdice/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "cdice/errors.hpp"

namespace cdice::svg {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f3b73", "#c0392b", "#2e8b57", "#d4a017",
                                                 "#6a3d9a", "#17becf", "#7f7f7f", "#e377c2"};
constexpr std::array<const char*, 4> kBandFill = {"#9ecae1", "#fdd0a2", "#c7e9c0", "#dadaeb"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double d = std::max(1.0, std::abs(hi)) * 0.05;
      lo -= d;
      hi += d;
    }
  }
};

// Tick step of 1, 2 or 5 times a power of ten giving about five ticks.
double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string render_chart(const std::vector<Line>& lines, const std::vector<Band>& bands,
                         const ChartStyle& style) {
  if (lines.empty() && bands.empty()) throw ValidationError("svg: nothing to draw");
  Range xr, yr;
  for (const auto& l : lines) {
    if (l.x.empty() || l.x.size() != l.y.size()) throw ValidationError("svg: malformed line '" + l.label + "'");
    for (double v : l.x) xr.add(v);
    for (double v : l.y) yr.add(v);
  }
  for (const auto& b : bands) {
    if (b.x.empty() || b.lower.size() != b.x.size() || b.upper.size() != b.x.size()) {
      throw ValidationError("svg: malformed band '" + b.label + "'");
    }
    for (double v : b.x) xr.add(v);
    for (double v : b.lower) yr.add(v);
    for (double v : b.upper) yr.add(v);
  }
  xr.pad();
  yr.pad();

  const double left = 70, right = 170, top = 40, bottom = 55;
  const double w = style.width, h = style.height;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) +
       "\" height=\"" + std::to_string(style.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) + "\" fill=\"white\"/>\n";
  if (!style.title.empty()) {
    s += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(style.title) + "</text>\n";
  }

  for (int axis = 0; axis < 2; ++axis) {
    const Range& r = axis == 0 ? xr : yr;
    const double step = nice_step(r.hi - r.lo);
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-9 * step; v += step) {
      const double tick = std::abs(v) < 1e-12 * step ? 0.0 : v;
      char label[32];
      std::snprintf(label, sizeof label, "%g", tick);
      if (axis == 0) {
        s += "<line class=\"grid\" x1=\"" + fmt(px(tick)) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(px(tick)) +
             "\" y2=\"" + fmt(top + ph) + "\" stroke=\"#e5e5e5\"/>\n";
        s += "<text x=\"" + fmt(px(tick)) + "\" y=\"" + fmt(top + ph + 16) + "\" text-anchor=\"middle\">" +
             label + "</text>\n";
      } else {
        s += "<line class=\"grid\" x1=\"" + fmt(left) + "\" y1=\"" + fmt(py(tick)) + "\" x2=\"" +
             fmt(left + pw) + "\" y2=\"" + fmt(py(tick)) + "\" stroke=\"#e5e5e5\"/>\n";
        s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(py(tick) + 4) + "\" text-anchor=\"end\">" +
             label + "</text>\n";
      }
    }
  }
  s += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!style.x_label.empty()) {
    s += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"" + fmt(h - 12) + "\" text-anchor=\"middle\">" +
         escape(style.x_label) + "</text>\n";
  }
  if (!style.y_label.empty()) {
    s += "<text x=\"18\" y=\"" + fmt(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt(top + ph / 2) + ")\">" + escape(style.y_label) + "</text>\n";
  }

  double legend_y = top + 8;
  auto legend = [&](const std::string& label, const char* colour, bool filled) {
    const double lx = left + pw + 12;
    if (filled) {
      s += "<rect x=\"" + fmt(lx) + "\" y=\"" + fmt(legend_y - 8) + "\" width=\"18\" height=\"10\" fill=\"" +
           colour + "\" fill-opacity=\"0.6\"/>\n";
    } else {
      s += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(legend_y - 3) + "\" x2=\"" + fmt(lx + 18) + "\" y2=\"" +
           fmt(legend_y - 3) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    }
    s += "<text x=\"" + fmt(lx + 24) + "\" y=\"" + fmt(legend_y) + "\">" + escape(label) + "</text>\n";
    legend_y += 18;
  };

  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto& b = bands[i];
    const char* fill = kBandFill[i % kBandFill.size()];
    std::string pts;
    for (std::size_t j = 0; j < b.x.size(); ++j) pts += fmt(px(b.x[j])) + "," + fmt(py(b.upper[j])) + " ";
    for (std::size_t j = b.x.size(); j-- > 0;) pts += fmt(px(b.x[j])) + "," + fmt(py(b.lower[j])) + " ";
    pts.pop_back();
    s += "<polygon class=\"band\" points=\"" + pts + "\" fill=\"" + fill + "\" fill-opacity=\"0.6\" stroke=\"none\"><title>" +
         escape(b.label) + "</title></polygon>\n";
    legend(b.label, fill, true);
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& l = lines[i];
    const char* colour = kPalette[i % kPalette.size()];
    std::string pts;
    for (std::size_t j = 0; j < l.x.size(); ++j) {
      if (!std::isfinite(l.y[j])) continue;
      pts += fmt(px(l.x[j])) + "," + fmt(py(l.y[j])) + " ";
    }
    if (!pts.empty()) pts.pop_back();
    s += "<polyline class=\"series\" points=\"" + pts + "\" fill=\"none\" stroke=\"" + colour +
         "\" stroke-width=\"1.8\"><title>" + escape(l.label) + "</title></polyline>\n";
    legend(l.label, colour, false);
  }
  s += "</svg>\n";
  return s;
}

void save_chart(const std::filesystem::path& path, const std::vector<Line>& lines,
                const std::vector<Band>& bands, const ChartStyle& style) {
  const std::string text = render_chart(lines, bands, style);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("svg: cannot write " + path.string());
  out << text;
}

}  // namespace cdice::svg
