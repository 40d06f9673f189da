#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "maximin/harness.hpp"

namespace maximin {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 150;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

struct axis_range {
    double lo = 0.0, hi = 1.0;
    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

} // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<plot_series>& series) {
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (first) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                first = false;
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_hi = y_lo + 1;
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double y) { return kMarginTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << title << "</text>\n";

    // axes with 5 ticks each
    out << "<g stroke=\"#333\" stroke-width=\"1\">";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << py(y_lo) << "\" x2=\""
        << kMarginLeft + plot_w << "\" y2=\"" << py(y_lo) << "\"/>";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << py(y_lo) << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << py(y_hi) << "\"/></g>\n";
    for (int t = 0; t <= 4; ++t) {
        double xv = x_lo + (x_hi - x_lo) * t / 4.0;
        double yv = y_lo + (y_hi - y_lo) * t / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << py(y_lo) + 18
            << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
        out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << py(yv) << "\" x2=\""
            << kMarginLeft + plot_w << "\" y2=\"" << py(yv)
            << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    }
    out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kMarginTop + plot_h / 2
        << ")\">" << y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[s].points) out << num(px(x)) << ',' << num(py(y)) << ' ';
        out << "\"/>\n";
        for (const auto& [x, y] : series[s].points)
            out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        double ly = kMarginTop + 16.0 * static_cast<double>(s);
        out << "<rect x=\"" << kMarginLeft + plot_w + 12 << "\" y=\"" << ly
            << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << kMarginLeft + plot_w + 28 << "\" y=\"" << ly + 10 << "\">"
            << series[s].name << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string heatmap_svg(const std::string& title, const matrix& values) {
    const int rows = values.rows();
    const int cols = values.cols();
    double lo = values(0, 0), hi = values(0, 0);
    for (double v : values.flat()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) hi = lo + 1;

    const int cell = std::max(12, std::min(40, 480 / std::max(rows, cols)));
    const int w = kMarginLeft + cols * cell + 90;
    const int h = kMarginTop + rows * cell + 50;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
        << "</text>\n";
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            double t = (values(i, j) - lo) / (hi - lo);
            // white to dark blue
            int r = static_cast<int>(255 - 205 * t);
            int g = static_cast<int>(255 - 155 * t);
            int b = 255;
            out << "<rect x=\"" << kMarginLeft + j * cell << "\" y=\"" << kMarginTop + i * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << r << ','
                << g << ',' << b << ")\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
        }
        out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << kMarginTop + i * cell + cell / 2 + 4
            << "\" text-anchor=\"end\">" << i << "</text>\n";
    }
    for (int j = 0; j < cols; ++j)
        out << "<text x=\"" << kMarginLeft + j * cell + cell / 2 << "\" y=\""
            << kMarginTop + rows * cell + 14 << "\" text-anchor=\"middle\">" << j << "</text>\n";
    out << "<text x=\"" << kMarginLeft + cols * cell + 12 << "\" y=\"" << kMarginTop + 10
        << "\">max " << num(hi) << "</text>\n";
    out << "<text x=\"" << kMarginLeft + cols * cell + 12 << "\" y=\""
        << kMarginTop + rows * cell << "\">min " << num(lo) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace maximin
