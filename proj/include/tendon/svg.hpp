#pragma once

#include <string>
#include <vector>

namespace tendon {

/// Minimal self-contained SVG line charts; one <polyline> per series.
struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgChart {
    std::string title;
    std::vector<SvgSeries> series;
    int width = 640;
    int height = 360;
};

std::string render_chart(const SvgChart& chart);

/// Several charts stacked vertically in one document.
std::string render_charts(const std::vector<SvgChart>& charts);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tendon
