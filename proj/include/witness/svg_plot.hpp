#pragma once

#include <optional>
#include <string>
#include <vector>

namespace witness {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> error;  ///< optional symmetric error bars
  bool markers_only = false;
};

struct PlotLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Histogram of `values` with `bins` equal-width bins; a dashed vertical
/// line is drawn at `marker` when given.
std::string histogram_svg(const std::vector<double>& values, std::size_t bins, const PlotLabels& labels,
                          std::optional<double> marker = std::nullopt);

/// Line/scatter chart; a dashed horizontal line is drawn at `reference`.
std::string series_svg(const std::vector<PlotSeries>& series, const PlotLabels& labels,
                       std::optional<double> reference = std::nullopt);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

std::vector<HistogramBin> make_histogram(const std::vector<double>& values, std::size_t bins);

}  // namespace witness
