#include "svg.hpp"

#include "delaylab/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace delaylab::tools {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

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

std::string fixed(double v) {
    // Coordinates only need pixel precision; round to keep files small and stable.
    return format_number(std::round(v * 100.0) / 100.0);
}

}  // namespace

void write_line_chart(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series, bool log_y) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0, min_pos = x0;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            if (s.y[k] > 0.0) min_pos = std::min(min_pos, s.y[k]);
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    if (!std::isfinite(x0)) return;
    const auto ty = [&](double y) {
        if (!log_y) return y;
        return std::log10(std::max(y, std::isfinite(min_pos) ? min_pos : 1e-300));
    };
    double ylo = log_y ? ty(y0) : y0, yhi = log_y ? ty(y1) : y1;
    if (yhi - ylo < 1e-300) {
        ylo -= 0.5;
        yhi += 0.5;
    }
    if (x1 - x0 < 1e-300) x1 = x0 + 1.0;
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    const auto py = [&](double y) { return kTop + (yhi - ty(y)) / (yhi - ylo) * ph; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << escape(title) << "</text>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0;
        const double fy = ylo + (yhi - ylo) * k / 4.0;
        const double gy = kTop + ph - ph * k / 4.0;
        out << "<text x=\"" << fixed(px(fx)) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
            << format_number(std::round(fx * 1000.0) / 1000.0) << "</text>\n";
        const std::string tick = log_y ? "1e" + format_number(std::round(fy * 10.0) / 10.0)
                                       : format_number(std::round(fy * 1000.0) / 1000.0);
        out << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(gy + 4) << "\" text-anchor=\"end\">" << tick
            << "</text>\n";
        out << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << fixed(gy) << "\" y2=\""
            << fixed(gy) << "\" stroke=\"#ddd\"/>\n";
    }
    out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
        << escape(x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" transform=\"rotate(-90 16 " << kTop + ph / 2
        << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPalette.size()];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[s].x.size(); ++k)
            out << (k ? " " : "") << fixed(px(series[s].x[k])) << ',' << fixed(py(series[s].y[k]));
        out << "\"/>\n";
        const double ly = kTop + 14 + 16.0 * static_cast<double>(s);
        out << "<line x1=\"" << kLeft + pw + 10 << "\" x2=\"" << kLeft + pw + 30 << "\" y1=\"" << ly - 4
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kLeft + pw + 36 << "\" y=\"" << ly << "\">" << escape(series[s].label)
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace delaylab::tools
