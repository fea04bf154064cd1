#include "lpvss/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace lpvss {

namespace {

void emit_polyline(std::FILE* f, const Mat& data, std::size_t channel, double x0, double y0,
                   double width, double height, double lo, double hi, const char* color) {
    std::fprintf(f, "  <polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1\" points=\"", color);
    const std::size_t rows = data.rows();
    const double span = hi - lo > 0 ? hi - lo : 1.0;
    for (std::size_t k = 0; k < rows; ++k) {
        const double px = x0 + width * static_cast<double>(k) / static_cast<double>(rows - 1);
        const double py = y0 + height * (1.0 - (data(k, channel) - lo) / span);
        std::fprintf(f, "%.2f,%.2f ", px, py);
    }
    std::fprintf(f, "\"/>\n");
}

}  // namespace

void write_comparison_svg(const Mat& measured, const Mat& predicted, const std::string& path) {
    if (!measured.same_shape(predicted)) throw ShapeMismatch("svg: shapes differ");
    if (measured.rows() < 2) throw ShapeMismatch("svg: need at least 2 rows");

    const std::size_t channels = measured.cols();
    const double panel_w = 760.0, panel_h = 160.0, margin = 40.0, gap = 30.0;
    const double total_w = panel_w + 2 * margin;
    const double total_h = margin + channels * (panel_h + gap) + 10.0;

    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("cannot write '" + path + "'");
    std::fprintf(f,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                 "viewBox=\"0 0 %.0f %.0f\">\n",
                 total_w, total_h, total_w, total_h);
    std::fprintf(f, "  <rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n");
    std::fprintf(f,
                 "  <text x=\"%.0f\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">"
                 "measured (gray)  vs  predicted (red)</text>\n",
                 margin);

    for (std::size_t c = 0; c < channels; ++c) {
        const double y0 = margin + static_cast<double>(c) * (panel_h + gap);
        double lo = measured(0, c), hi = measured(0, c);
        for (std::size_t k = 0; k < measured.rows(); ++k) {
            lo = std::min({lo, measured(k, c), predicted(k, c)});
            hi = std::max({hi, measured(k, c), predicted(k, c)});
        }
        std::fprintf(f,
                     "  <rect x=\"%.0f\" y=\"%.0f\" width=\"%.0f\" height=\"%.0f\" fill=\"none\" "
                     "stroke=\"#999\"/>\n",
                     margin, y0, panel_w, panel_h);
        std::fprintf(f,
                     "  <text x=\"%.0f\" y=\"%.0f\" font-family=\"sans-serif\" font-size=\"11\" "
                     "fill=\"#333\">y%zu  [%.4g, %.4g]</text>\n",
                     margin, y0 - 4.0, c + 1, lo, hi);
        emit_polyline(f, measured, c, margin, y0, panel_w, panel_h, lo, hi, "#555555");
        emit_polyline(f, predicted, c, margin, y0, panel_w, panel_h, lo, hi, "#d62728");
    }
    std::fprintf(f, "</svg>\n");
    std::fclose(f);
}

}  // namespace lpvss
