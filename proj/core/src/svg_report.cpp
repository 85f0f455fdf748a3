#include "driftlab/svg_report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace driftlab {

namespace {

constexpr double kPanelWidth = 640.0;
constexpr double kPanelHeight = 220.0;
constexpr double kMarginLeft = 56.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 40.0;
constexpr double kLegendHeight = 26.0;

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string format_number(double value, const char* format = "%g") {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, format, value);
    return buffer;
}

std::string escape_text(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_score_svg(const ScoreTensor& tensor) {
    const std::size_t n_metrics = tensor.n_metrics();
    const std::size_t n_steps = tensor.n_steps();
    const double panel_stride = kMarginTop + kPanelHeight + kMarginBottom;
    const double width = kMarginLeft + kPanelWidth + kMarginRight;
    const double height =
        kLegendHeight + panel_stride * static_cast<double>(n_metrics == 0 ? 1 : n_metrics);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << width << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
        << height << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";

    // Legend: one swatch per classifier.
    double legend_x = kMarginLeft;
    for (std::size_t c = 0; c < tensor.n_classifiers(); ++c) {
        const char* color = kPalette[c % kPalette.size()];
        svg << "<rect x=\"" << legend_x << "\" y=\"8\" width=\"14\" height=\"4\" fill=\""
            << color << "\"/>\n";
        svg << "<text x=\"" << legend_x + 18 << "\" y=\"14\" font-family=\"sans-serif\" "
               "font-size=\"12\">"
            << escape_text(tensor.classifier_names()[c]) << "</text>\n";
        legend_x += 24.0 + 7.0 * static_cast<double>(tensor.classifier_names()[c].size());
    }

    const auto x_of = [&](std::size_t step) {
        if (n_steps <= 1) return kMarginLeft + kPanelWidth / 2.0;
        return kMarginLeft +
               kPanelWidth * static_cast<double>(step) / static_cast<double>(n_steps - 1);
    };

    for (std::size_t m = 0; m < n_metrics; ++m) {
        const double top = kLegendHeight + panel_stride * static_cast<double>(m) +
                           kMarginTop;
        const double bottom = top + kPanelHeight;
        const auto y_of = [&](double value) {
            return bottom - kPanelHeight * value;
        };

        svg << "<text x=\"" << kMarginLeft << "\" y=\"" << top - 10
            << "\" font-family=\"sans-serif\" font-size=\"13\" font-weight=\"bold\">"
            << escape_text(tensor.metric_names()[m]) << "</text>\n";

        // Axes and horizontal gridlines at 0, 0.25, ..., 1.
        for (int tick = 0; tick <= 4; ++tick) {
            const double value = 0.25 * tick;
            const double y = y_of(value);
            svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y << "\" x2=\""
                << kMarginLeft + kPanelWidth << "\" y2=\"" << y
                << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
            svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << y + 4
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
                << format_number(value) << "</text>\n";
        }
        svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << top << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << bottom
            << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << bottom << "\" x2=\""
            << kMarginLeft + kPanelWidth << "\" y2=\"" << bottom
            << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

        // A few x ticks labeled with 1-based chunk indices.
        const std::size_t tick_count = n_steps == 0 ? 0 : std::min<std::size_t>(6, n_steps);
        for (std::size_t t = 0; t < tick_count; ++t) {
            const std::size_t step =
                tick_count == 1 ? 0 : t * (n_steps - 1) / (tick_count - 1);
            const double x = x_of(step);
            svg << "<line x1=\"" << x << "\" y1=\"" << bottom << "\" x2=\"" << x
                << "\" y2=\"" << bottom + 4 << "\" stroke=\"#333333\"/>\n";
            svg << "<text x=\"" << x << "\" y=\"" << bottom + 16
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
                << step + 1 << "</text>\n";
        }
        svg << "<text x=\"" << kMarginLeft + kPanelWidth / 2 << "\" y=\"" << bottom + 32
            << "\" font-family=\"sans-serif\" font-size=\"11\" "
               "text-anchor=\"middle\">chunk</text>\n";

        for (std::size_t c = 0; c < tensor.n_classifiers(); ++c) {
            if (n_steps == 0) break;
            svg << "<polyline fill=\"none\" stroke=\"" << kPalette[c % kPalette.size()]
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t s = 0; s < n_steps; ++s) {
                const double value = std::clamp(tensor.at(c, s, m), 0.0, 1.0);
                svg << format_number(x_of(s), "%.2f") << ','
                    << format_number(y_of(value), "%.2f") << ' ';
            }
            svg << "\"/>\n";
        }
    }

    svg << "</svg>\n";
    return svg.str();
}

void write_score_svg(const ScoreTensor& tensor, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot create '" + path + "'");
    }
    out << render_score_svg(tensor);
    if (!out) {
        throw std::runtime_error("failed to write '" + path + "'");
    }
}

}  // namespace driftlab
