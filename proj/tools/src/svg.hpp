#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace delaylab::tools {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal standalone SVG line chart. With log_y, nonpositive values are
/// clipped to the smallest positive value in the data.
void write_line_chart(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series, bool log_y = false);

}  // namespace delaylab::tools
