#include "cmwave/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace cmwave::svg {

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 90, kRight = 30, kTop = 50, kBottom = 70;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                               "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string fixed(double v, int digits) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  (void)ec;
  return std::string(buf, ptr);
}

std::string label(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
  (void)ec;
  return std::string(buf, ptr);
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

  void widen() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(lo))) {
      const double pad = std::max(1e-9, 1e-3 * std::abs(lo));
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, std::span<const Series> series) {
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.widen();
  yr.widen();

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" "
         "height=\"600\" font-family=\"sans-serif\" font-size=\"14\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-size=\"18\">" << escape(title)
      << "</text>\n";

  const std::string x0 = fixed(kLeft, 2), x1 = fixed(kLeft + pw, 2);
  const std::string y0 = fixed(kTop + ph, 2), y1 = fixed(kTop, 2);
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
      << "\" stroke=\"black\"/>\n";

  out << "<text x=\"" << x0 << "\" y=\"" << fixed(kTop + ph + 20, 2) << "\" text-anchor=\"start\">"
      << label(xr.lo) << "</text>\n";
  out << "<text x=\"" << x1 << "\" y=\"" << fixed(kTop + ph + 20, 2) << "\" text-anchor=\"end\">"
      << label(xr.hi) << "</text>\n";
  out << "<text x=\"" << fixed(kLeft - 8, 2) << "\" y=\"" << y0 << "\" text-anchor=\"end\">"
      << label(yr.lo) << "</text>\n";
  out << "<text x=\"" << fixed(kLeft - 8, 2) << "\" y=\"" << fixed(kTop + 14, 2)
      << "\" text-anchor=\"end\">" << label(yr.hi) << "</text>\n";
  out << "<text x=\"" << fixed(kLeft + pw / 2, 2) << "\" y=\"" << fixed(kHeight - 20, 2)
      << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  out << "<text x=\"20\" y=\"" << fixed(kTop + ph / 2, 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << fixed(kTop + ph / 2, 2) << ")\">"
      << escape(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[i % kPalette.size()]
        << "\" points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    bool first = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      out << (first ? "" : " ") << fixed(px(s.x[k]), 2) << "," << fixed(py(s.y[k]), 2);
      first = false;
    }
    out << "\"><title>" << escape(s.label) << "</title></polyline>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cmwave::svg
