#include "drmine/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace drmine::svg {
namespace {

constexpr std::array<const char*, 12> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a",
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string label_num(double v) {
    char buf[32];
    if (v == std::floor(v) && std::abs(v) < 1e12) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%.3g", v);
    }
    std::string s = buf;
    if (s == "-0") s = "0";
    return s;
}

const char* color(std::size_t i) { return kPalette[i % kPalette.size()]; }

void open_svg(std::ostringstream& out, double width, double height, const std::string& title) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(title) << "</text>\n";
}

struct Range {
    double lo;
    double hi;
};

Range padded(double lo, double hi) {
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace

std::string escape(std::string_view text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string scatter_plot(const std::vector<ScatterPoint>& points, const ScatterOptions& options) {
    constexpr double width = 640, height = 480, left = 70, right = 150, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    if (!points.empty()) {
        x_lo = x_hi = points.front().x;
        y_lo = y_hi = points.front().y;
        for (const auto& p : points) {
            x_lo = std::min(x_lo, p.x);
            x_hi = std::max(x_hi, p.x);
            y_lo = std::min(y_lo, p.y);
            y_hi = std::max(y_hi, p.y);
        }
    }
    const Range xr = padded(x_lo, x_hi);
    const Range yr = padded(y_lo, y_hi);
    auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto sy = [&](double y) { return top + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::ostringstream out;
    open_svg(out, width, height, options.title);
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w) << "\" height=\""
        << num(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Axis ticks: five evenly spaced, or one per integer.
    out << "<g font-size=\"11\">\n";
    if (options.integer_x_ticks) {
        for (auto x = static_cast<long long>(std::ceil(x_lo)); x <= static_cast<long long>(std::floor(x_hi)); ++x) {
            out << "<text x=\"" << num(sx(static_cast<double>(x))) << "\" y=\"" << num(top + plot_h + 16)
                << "\" text-anchor=\"middle\">" << x << "</text>\n";
        }
    } else {
        for (int i = 0; i <= 4; ++i) {
            const double x = xr.lo + (xr.hi - xr.lo) * i / 4.0;
            out << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(top + plot_h + 16) << "\" text-anchor=\"middle\">"
                << escape(label_num(x)) << "</text>\n";
        }
    }
    for (int i = 0; i <= 4; ++i) {
        const double y = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(y) + 4) << "\" text-anchor=\"end\">"
            << escape(label_num(y)) << "</text>\n";
    }
    out << "</g>\n";
    out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(height - 15)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(options.x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << num(top + plot_h / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << num(top + plot_h / 2) << ")\">" << escape(options.y_label) << "</text>\n";

    if (options.connect && points.size() > 1) {
        out << "<polyline fill=\"none\" stroke=\"#555555\" points=\"";
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i) out << ' ';
            out << num(sx(points[i].x)) << ',' << num(sy(points[i].y));
        }
        out << "\"/>\n";
    }
    out << "<g>\n";
    for (const auto& p : points) {
        out << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y)) << "\" r=\"4\" fill=\""
            << color(p.group) << "\" fill-opacity=\"0.8\"/>\n";
    }
    out << "</g>\n";

    if (options.legend) {
        std::vector<std::size_t> groups;
        for (const auto& p : points) groups.push_back(p.group);
        std::sort(groups.begin(), groups.end());
        groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
        out << "<g font-size=\"12\">\n";
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const double y = top + 10 + 18.0 * static_cast<double>(i);
            out << "<circle cx=\"" << num(width - right + 20) << "\" cy=\"" << num(y) << "\" r=\"5\" fill=\""
                << color(groups[i]) << "\"/>\n";
            out << "<text x=\"" << num(width - right + 30) << "\" y=\"" << num(y + 4) << "\">"
                << escape(options.legend_prefix + std::to_string(groups[i])) << "</text>\n";
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, const std::string& y_label) {
    constexpr double height = 480, left = 70, top = 40, bottom = 140;
    const double bar_w = 40, gap = 20;
    const double plot_w = std::max(200.0, static_cast<double>(values.size()) * (bar_w + gap) + gap);
    const double width = left + plot_w + 30;
    const double plot_h = height - top - bottom;
    double max_v = 0.0;
    for (const double v : values) max_v = std::max(max_v, v);
    if (max_v <= 0.0) max_v = 1.0;

    std::ostringstream out;
    open_svg(out, width, height, title);
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(left + plot_w)
        << "\" y2=\"" << num(top + plot_h) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"18\" y=\"" << num(top + plot_h / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << num(top + plot_h / 2) << ")\">" << escape(y_label) << "</text>\n";
    out << "<g font-size=\"11\">\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double h = values[i] / max_v * plot_h;
        const double x = left + gap + static_cast<double>(i) * (bar_w + gap);
        const double y = top + plot_h - h;
        out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(bar_w) << "\" height=\""
            << num(h) << "\" fill=\"" << color(i) << "\"/>\n";
        out << "<text x=\"" << num(x + bar_w / 2) << "\" y=\"" << num(y - 4) << "\" text-anchor=\"middle\">"
            << escape(label_num(values[i])) << "</text>\n";
        const double lx = x + bar_w / 2;
        const double ly = top + plot_h + 12;
        out << "<text x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" text-anchor=\"end\" transform=\"rotate(-40 "
            << num(lx) << ' ' << num(ly) << ")\">" << escape(i < labels.size() ? labels[i] : "") << "</text>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

std::string heatmap(const std::string& title, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& column_labels,
                    const std::vector<std::vector<std::size_t>>& counts) {
    constexpr double cell_w = 44, cell_h = 18, left = 110, top = 60;
    const double width = left + cell_w * static_cast<double>(column_labels.size()) + 20;
    const double height = top + cell_h * static_cast<double>(row_labels.size()) + 20;
    std::size_t max_count = 0;
    for (const auto& row : counts) {
        for (const auto c : row) max_count = std::max(max_count, c);
    }

    std::ostringstream out;
    open_svg(out, width, height, title);
    out << "<g font-size=\"11\">\n";
    for (std::size_t c = 0; c < column_labels.size(); ++c) {
        out << "<text x=\"" << num(left + cell_w * (static_cast<double>(c) + 0.5)) << "\" y=\"" << num(top - 6)
            << "\" text-anchor=\"middle\">" << escape(column_labels[c]) << "</text>\n";
    }
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
        const double y = top + cell_h * static_cast<double>(r);
        out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + cell_h * 0.7) << "\" text-anchor=\"end\">"
            << escape(row_labels[r]) << "</text>\n";
        for (std::size_t c = 0; c < column_labels.size(); ++c) {
            const std::size_t v = r < counts.size() && c < counts[r].size() ? counts[r][c] : 0;
            const double shade = max_count ? static_cast<double>(v) / static_cast<double>(max_count) : 0.0;
            const int level = static_cast<int>(std::lround(255.0 * (1.0 - shade)));
            char fill[8];
            std::snprintf(fill, sizeof(fill), "#%02x%02xff", level, level);
            const double x = left + cell_w * static_cast<double>(c);
            out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell_w) << "\" height=\""
                << num(cell_h) << "\" fill=\"" << fill << "\" stroke=\"white\"/>\n";
            out << "<text x=\"" << num(x + cell_w / 2) << "\" y=\"" << num(y + cell_h * 0.7)
                << "\" text-anchor=\"middle\" fill=\"" << (shade > 0.5 ? "white" : "black") << "\">" << v
                << "</text>\n";
        }
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

std::string pie_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values) {
    constexpr double radius = 150, cx = 200, cy = 220;
    const double width = 720;
    const double height = std::max(440.0, 60.0 + 20.0 * static_cast<double>(values.size()));
    double total = 0.0;
    for (const double v : values) total += std::max(v, 0.0);

    std::ostringstream out;
    open_svg(out, width, height, title);
    out << "<g stroke=\"white\">\n";
    double angle = -std::numbers::pi / 2;
    for (std::size_t i = 0; i < values.size() && total > 0.0; ++i) {
        const double v = std::max(values[i], 0.0);
        if (v <= 0.0) continue;
        const double sweep = 2 * std::numbers::pi * v / total;
        if (v == total) {
            out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(radius) << "\" fill=\""
                << color(i) << "\"/>\n";
            break;
        }
        const double x1 = cx + radius * std::cos(angle), y1 = cy + radius * std::sin(angle);
        const double x2 = cx + radius * std::cos(angle + sweep), y2 = cy + radius * std::sin(angle + sweep);
        out << "<path d=\"M " << num(cx) << ' ' << num(cy) << " L " << num(x1) << ' ' << num(y1) << " A "
            << num(radius) << ' ' << num(radius) << " 0 " << (sweep > std::numbers::pi ? 1 : 0) << " 1 " << num(x2)
            << ' ' << num(y2) << " Z\" fill=\"" << color(i) << "\"/>\n";
        angle += sweep;
    }
    out << "</g>\n<g font-size=\"12\">\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double y = 60 + 20.0 * static_cast<double>(i);
        out << "<rect x=\"400\" y=\"" << num(y - 10) << "\" width=\"12\" height=\"12\" fill=\"" << color(i) << "\"/>\n";
        out << "<text x=\"418\" y=\"" << num(y) << "\">"
            << escape((i < labels.size() ? labels[i] : "") + " (" + label_num(values[i]) + ")") << "</text>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

}  // namespace drmine::svg
