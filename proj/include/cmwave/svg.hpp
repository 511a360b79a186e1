#pragma once

#include <span>
#include <string>
#include <vector>

namespace cmwave::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Static polyline chart on a fixed 800×600 viewBox with min/max axis labels.
/// Output depends only on the inputs.
std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, std::span<const Series> series);

}  // namespace cmwave::svg
