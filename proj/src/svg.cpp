#include "tendon/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "tendon/errors.hpp"

namespace tendon {

namespace {

constexpr int kMarginLeft = 56;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 28;
constexpr int kMarginBottom = 32;

std::string chart_body(const SvgChart& chart, int y_offset) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const SvgSeries& s : chart.series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;

    const double plot_w = chart.width - kMarginLeft - kMarginRight;
    const double plot_h = chart.height - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) {
        return y_offset + kMarginTop + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h;
    };

    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"13\" font-family=\"sans-serif\">%s"
                  "</text>\n",
                  kMarginLeft, y_offset + 18, chart.title.c_str());
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%d\" y=\"%d\" width=\"%.0f\" height=\"%.0f\" fill=\"none\" "
                  "stroke=\"#999\"/>\n",
                  kMarginLeft, y_offset + kMarginTop, plot_w, plot_h);
    out += buf;

    int label_at = 0;
    for (const SvgSeries& s : chart.series) {
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i < s.y.size() && !std::isfinite(s.y[i])) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
            out += buf;
        }
        out += "\"/>\n";
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%d\" y=\"%d\" font-size=\"11\" font-family=\"sans-serif\" "
                      "fill=\"%s\">%s</text>\n",
                      kMarginLeft + 8 + 120 * label_at++, y_offset + kMarginTop + 14,
                      s.color.c_str(), s.label.c_str());
        out += buf;
    }
    // axis extremes
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%.0f\" font-size=\"10\" font-family=\"sans-serif\">%.3g"
                  "</text>\n",
                  4, py(ymax) + 4, ymax);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%.0f\" font-size=\"10\" font-family=\"sans-serif\">%.3g"
                  "</text>\n",
                  4, py(ymin) + 4, ymin);
    out += buf;
    return out;
}

}  // namespace

std::string render_chart(const SvgChart& chart) { return render_charts({chart}); }

std::string render_charts(const std::vector<SvgChart>& charts) {
    int width = 0, height = 0;
    for (const SvgChart& c : charts) {
        width = std::max(width, c.width);
        height += c.height;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\">\n",
                  width, height);
    std::string out = buf;
    int y = 0;
    for (const SvgChart& c : charts) {
        out += chart_body(c, y);
        y += c.height;
    }
    out += "</svg>\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << content;
}

}  // namespace tendon
