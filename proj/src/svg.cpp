#include "qglab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qg::svg {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

}  // namespace

std::string loglog_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                         const std::vector<Series>& series, double reference_slope) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0 && s.y[i] > 0)) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  if (!std::isfinite(xmin)) xmin = -1, xmax = 0, ymin = -1, ymax = 0;
  xmin = std::floor(xmin * 10) / 10 - 0.05;
  xmax = std::ceil(xmax * 10) / 10 + 0.05;
  ymin = std::floor(ymin) - 0.0;
  ymax = std::ceil(ymax) + 0.0;
  if (ymax - ymin < 1) ymax = ymin + 1;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double lx) { return kLeft + (lx - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ly) { return kTop + (ymax - ly) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<defs><clipPath id=\"plot\"><rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
    << "\" height=\"" << ph << "\"/></clipPath></defs>\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); ++d) {
    o << "<line x1=\"" << kLeft << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(py(d)) << "\" y2=\"" << num(py(d))
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(d) + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  for (double t : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 1.0, 2.0}) {
    const double lx = std::log10(t);
    if (lx < xmin || lx > xmax) continue;
    o << "<line x1=\"" << num(px(lx)) << "\" x2=\"" << num(px(lx)) << "\" y1=\"" << kTop << "\" y2=\"" << num(kTop + ph)
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << num(px(lx)) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">" << t
      << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16) << "\" text-anchor=\"middle\">"
    << escape(xlabel) << "</text>\n";
  o << "<text transform=\"translate(18," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(ylabel) << "</text>\n";

  int legend = 0;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0 && s.y[i] > 0)) continue;
      pts += num(px(std::log10(s.x[i]))) + "," + num(py(std::log10(s.y[i]))) + " ";
      o << "<circle cx=\"" << num(px(std::log10(s.x[i]))) << "\" cy=\"" << num(py(std::log10(s.y[i])))
        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 12 + 18 * legend++;
    o << "<line x1=\"" << num(kLeft + pw + 12) << "\" x2=\"" << num(kLeft + pw + 32) << "\" y1=\"" << num(ly - 4)
      << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(kLeft + pw + 38) << "\" y=\"" << num(ly) << "\">" << escape(s.name) << "</text>\n";
  }

  if (reference_slope > 0 && !series.empty()) {
    const auto& s = series.front();
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0 && s.y[i] > 0)) continue;
      const double x0 = std::log10(s.x[i]), y0 = std::log10(s.y[i]);
      auto ref = [&](double lx) { return y0 + reference_slope * (lx - x0); };
      o << "<line x1=\"" << num(px(xmin)) << "\" y1=\"" << num(py(ref(xmin))) << "\" x2=\"" << num(px(xmax))
        << "\" y2=\"" << num(py(ref(xmax))) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\" clip-path=\"url(#plot)\"/>\n";
      const double ly = kTop + 12 + 18 * legend;
      o << "<line x1=\"" << num(kLeft + pw + 12) << "\" x2=\"" << num(kLeft + pw + 32) << "\" y1=\"" << num(ly - 4)
        << "\" y2=\"" << num(ly - 4) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
      o << "<text x=\"" << num(kLeft + pw + 38) << "\" y=\"" << num(ly) << "\">slope " << reference_slope
        << "</text>\n";
      break;
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace qg::svg
