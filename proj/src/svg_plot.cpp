#include "witness/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace witness {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
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

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void pad_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double c = lo;
    lo = c - 0.5 * std::max(1e-12, std::abs(c));
    hi = c + 0.5 * std::max(1e-12, std::abs(c));
    if (lo == hi) { lo -= 1; hi += 1; }
    return;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

void open_svg(std::ostringstream& out, const PlotLabels& labels) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(labels.title)
      << "</text>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(labels.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kHeight / 2 << ")\">" << escape(labels.y_label) << "</text>\n";
}

void axes(std::ostringstream& out, const Frame& f) {
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
      << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = f.x0 + (f.x1 - f.x0) * t / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * t / 4.0;
    out << "<text x=\"" << f.px(xv) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\">" << num(xv)
        << "</text>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
  }
}

}  // namespace

std::vector<HistogramBin> make_histogram(const std::vector<double>& values, std::size_t bins) {
  if (values.empty() || bins == 0) return {};
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<HistogramBin> out(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + width * static_cast<double>(b);
    out[b].hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++out[std::min(b, bins - 1)].count;
  }
  return out;
}

std::string histogram_svg(const std::vector<double>& values, std::size_t bins, const PlotLabels& labels,
                          std::optional<double> marker) {
  std::ostringstream out;
  open_svg(out, labels);
  const auto hist = make_histogram(values, bins);
  if (!hist.empty()) {
    std::size_t peak = 1;
    for (const auto& b : hist) peak = std::max(peak, b.count);
    double x0 = hist.front().lo, x1 = hist.back().hi;
    if (marker) {
      x0 = std::min(x0, *marker);
      x1 = std::max(x1, *marker);
    }
    const Frame f{x0, x1, 0.0, static_cast<double>(peak) * 1.05};
    axes(out, f);
    for (const auto& b : hist) {
      const double x = f.px(b.lo);
      const double w = std::max(0.5, f.px(b.hi) - x - 0.5);
      const double y = f.py(static_cast<double>(b.count));
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << f.py(0.0) - y
          << "\" fill=\"" << kPalette[0] << "\"/>\n";
    }
    if (marker) {
      out << "<line x1=\"" << f.px(*marker) << "\" y1=\"" << kTop << "\" x2=\"" << f.px(*marker) << "\" y2=\""
          << kHeight - kBottom << "\" stroke=\"" << kPalette[1] << "\" stroke-dasharray=\"6,4\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string series_svg(const std::vector<PlotSeries>& series, const PlotLabels& labels,
                       std::optional<double> reference) {
  std::ostringstream out;
  open_svg(out, labels);
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      const double e = k < s.error.size() ? s.error[k] : 0.0;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k] - e);
      y1 = std::max(y1, s.y[k] + e);
    }
  }
  if (reference) {
    y0 = std::min(y0, *reference);
    y1 = std::max(y1, *reference);
  }
  if (x0 > x1) {
    x0 = 0; x1 = 1; y0 = 0; y1 = 1;
  }
  pad_range(x0, x1);
  pad_range(y0, y1);
  const Frame f{x0, x1, y0, y1};
  axes(out, f);
  if (reference) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << f.py(*reference) << "\" x2=\"" << kWidth - kRight << "\" y2=\""
        << f.py(*reference) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  }
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % 5];
    if (!s.markers_only && s.x.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (std::size_t k = 0; k < s.x.size(); ++k) out << f.px(s.x[k]) << ',' << f.py(s.y[k]) << ' ';
      out << "\"/>\n";
    }
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (k < s.error.size() && s.error[k] > 0.0) {
        out << "<line x1=\"" << f.px(s.x[k]) << "\" y1=\"" << f.py(s.y[k] - s.error[k]) << "\" x2=\""
            << f.px(s.x[k]) << "\" y2=\"" << f.py(s.y[k] + s.error[k]) << "\" stroke=\"" << color << "\"/>\n";
      }
      out << "<circle cx=\"" << f.px(s.x[k]) << "\" cy=\"" << f.py(s.y[k]) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    out << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16 + 16 * static_cast<double>(si) << "\" fill=\""
        << color << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace witness
