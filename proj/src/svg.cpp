#include "tissf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tissf::svg {

namespace {

constexpr double kPanelW = 460.0;
constexpr double kPanelH = 330.0;
constexpr double kMarginL = 58.0;
constexpr double kMarginR = 14.0;
constexpr double kMarginT = 30.0;
constexpr double kMarginB = 44.0;

std::string num(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finalize() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

// 1-2-5 tick progression with ~5 ticks over the range
std::vector<double> ticks(double lo, double hi) {
    double span = hi - lo;
    double raw = span / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double norm = raw / mag;
    double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
    std::vector<double> out;
    double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-12 * span; v += step) {
        out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    }
    return out;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

void render_panel(std::ostringstream& os, const Panel& panel, double ox, double oy) {
    Range rx, ry;
    for (const auto& s : panel.series) {
        for (double v : s.x) rx.add(v);
        for (double v : s.y) ry.add(v);
    }
    rx.finalize();
    ry.finalize();

    const double x0 = ox + kMarginL, y0 = oy + kMarginT;
    const double w = kPanelW - kMarginL - kMarginR;
    const double h = kPanelH - kMarginT - kMarginB;

    auto px = [&](double v) { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * w; };
    auto py = [&](double v) { return y0 + h - (v - ry.lo) / (ry.hi - ry.lo) * h; };

    os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(w)
       << "\" height=\"" << num(h) << "\" fill=\"white\" stroke=\"#333\" stroke-width=\"1\"/>\n";

    for (double t : ticks(rx.lo, rx.hi)) {
        double X = px(t);
        os << "<line x1=\"" << num(X) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(X)
           << "\" y2=\"" << num(y0 + h) << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
        os << "<text x=\"" << num(X) << "\" y=\"" << num(y0 + h + 16)
           << "\" font-size=\"10\" text-anchor=\"middle\" fill=\"#333\">" << num(t)
           << "</text>\n";
    }
    for (double t : ticks(ry.lo, ry.hi)) {
        double Y = py(t);
        os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(Y) << "\" x2=\"" << num(x0 + w)
           << "\" y2=\"" << num(Y) << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
        os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(Y + 3)
           << "\" font-size=\"10\" text-anchor=\"end\" fill=\"#333\">" << num(t) << "</text>\n";
    }

    for (const auto& s : panel.series) {
        if (s.x.empty() || s.x.size() != s.y.size()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\""
           << num(s.width) << "\"";
        if (s.dashed) os << " stroke-dasharray=\"6 4\"";
        os << " points=\"";
        // thin dense series so files stay small; plots do not need every step
        size_t stride = std::max<size_t>(1, s.x.size() / 2000);
        for (size_t i = 0; i < s.x.size(); i += stride) {
            os << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
        }
        if ((s.x.size() - 1) % stride != 0) {
            os << num(px(s.x.back())) << "," << num(py(s.y.back()));
        }
        os << "\"/>\n";
    }

    os << "<text x=\"" << num(ox + kPanelW / 2) << "\" y=\"" << num(oy + 18)
       << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111\">" << escape(panel.title)
       << "</text>\n";
    os << "<text x=\"" << num(x0 + w / 2) << "\" y=\"" << num(y0 + h + 32)
       << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#111\">" << escape(panel.xlabel)
       << "</text>\n";
    os << "<text x=\"" << num(ox + 14) << "\" y=\"" << num(y0 + h / 2)
       << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#111\" transform=\"rotate(-90 "
       << num(ox + 14) << " " << num(y0 + h / 2) << ")\">" << escape(panel.ylabel)
       << "</text>\n";

    double ly = y0 + 14;
    for (const auto& s : panel.series) {
        if (s.label.empty()) continue;
        os << "<line x1=\"" << num(x0 + w - 120) << "\" y1=\"" << num(ly - 3) << "\" x2=\""
           << num(x0 + w - 100) << "\" y2=\"" << num(ly - 3) << "\" stroke=\"" << s.color
           << "\" stroke-width=\"2\"";
        if (s.dashed) os << " stroke-dasharray=\"6 4\"";
        os << "/>\n";
        os << "<text x=\"" << num(x0 + w - 95) << "\" y=\"" << num(ly)
           << "\" font-size=\"10\" fill=\"#111\">" << escape(s.label) << "</text>\n";
        ly += 13;
    }
}

}  // namespace

std::string render(const std::vector<Panel>& panels, int columns) {
    if (columns < 1) columns = 1;
    int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
    double width = columns * kPanelW;
    double height = rows * kPanelH;

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
       << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (size_t i = 0; i < panels.size(); ++i) {
        double ox = static_cast<double>(i % columns) * kPanelW;
        double oy = static_cast<double>(i / columns) * kPanelH;
        render_panel(os, panels[i], ox, oy);
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace tissf::svg
