#include "d2dra/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "d2dra/errors.hpp"

namespace d2dra {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Round a range outward to pleasant tick positions.
std::vector<double> make_ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) hi = lo + 1.0;
  const double raw_step = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
  double step = mag;
  for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (mag * mult >= raw_step) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  }
  return ticks;
}

}  // namespace

std::string render_svg_chart(const ChartSpec& spec) {
  if (spec.series.empty()) throw ConfigError("render_svg_chart: no series");

  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  bool first = true;
  for (const ChartSeries& s : spec.series) {
    if (s.x.size() != s.y.size()) throw ConfigError("render_svg_chart: x/y length mismatch");
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      if (first) {
        x_lo = x_hi = s.x[k];
        y_lo = y_hi = s.y[k];
        first = false;
      } else {
        x_lo = std::min(x_lo, s.x[k]);
        x_hi = std::max(x_hi, s.x[k]);
        y_lo = std::min(y_lo, s.y[k]);
        y_hi = std::max(y_hi, s.y[k]);
      }
    }
  }
  if (y_lo > 0.0 && y_lo < 0.3 * y_hi) y_lo = 0.0;  // anchor near-zero ranges at 0
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_hi += y_pad;
  if (y_lo != 0.0) y_lo -= y_pad;

  const double ml = 78, mr = 24, mt = 46, mb = 56;
  const double pw = spec.width - ml - mr;
  const double ph = spec.height - mt - mb;
  auto sx = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return mt + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << spec.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << escape_xml(spec.title) << "</text>\n";

  for (double t : make_ticks(x_lo, x_hi)) {
    const double px = sx(t);
    svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(px)
        << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(mt + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
        << "</text>\n";
  }
  for (double t : make_ticks(y_lo, y_hi)) {
    const double py = sy(t);
    svg << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(ml + pw)
        << "\" y2=\"" << fmt(py) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
        << "</text>\n";
  }
  svg << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(spec.height - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape_xml(spec.x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << fmt(mt + ph / 2) << ")\">" << escape_xml(spec.y_label) << "</text>\n";

  for (const ChartSeries& s : spec.series) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << " points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      svg << fmt(sx(s.x[k])) << ',' << fmt(sy(s.y[k])) << ' ';
    }
    svg << "\"/>\n";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      svg << "<circle cx=\"" << fmt(sx(s.x[k])) << "\" cy=\"" << fmt(sy(s.y[k]))
          << "\" r=\"2.6\" fill=\"" << s.color << "\"/>\n";
    }
  }

  double ly = mt + 10;
  for (const ChartSeries& s : spec.series) {
    const double lx = ml + pw - 150;
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 26)
        << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << "/>\n";
    svg << "<text x=\"" << fmt(lx + 32) << "\" y=\"" << fmt(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.label)
        << "</text>\n";
    ly += 16;
  }

  svg << "</svg>\n";
  return svg.str();
}

void write_svg_chart(const ChartSpec& spec, const std::string& path) {
  const std::string body = render_svg_chart(spec);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << body;
  out.flush();
  if (!out) throw IoError("write failure: " + path);
}

}  // namespace d2dra
