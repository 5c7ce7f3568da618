#pragma once

#include <string>
#include <vector>

namespace tissf::svg {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f6fb2";
    double width = 1.2;
    bool dashed = false;
    std::string label;
};

struct Panel {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
};

/// Renders panels into a static SVG grid. Output is a pure function of the
/// input (byte-identical across runs).
std::string render(const std::vector<Panel>& panels, int columns);

}  // namespace tissf::svg
