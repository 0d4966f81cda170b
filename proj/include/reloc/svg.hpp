#pragma once

#include <string>
#include <vector>

namespace reloc::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
};

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);

struct Histogram {
  std::string label;
  std::vector<double> samples;
};

/// One panel per histogram, stacked vertically, common range [lo, hi].
std::string histogram_panels(const std::string& title, const std::vector<Histogram>& panels, double lo, double hi,
                             std::size_t bins = 50, double marker = -1.0);

}  // namespace reloc::svg
