#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Dependency-free SVG charts. Output depends only on the inputs, so equal
// data gives byte-identical files.
namespace drmine::svg {

std::string escape(std::string_view text);

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::size_t group = 0;  // selects the fill color
};

struct ScatterOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool connect = false;          // draw a polyline through the points in order
    bool integer_x_ticks = false;  // label every integer x (silhouette sweeps)
    bool legend = false;           // one legend entry per group
    std::string legend_prefix = "cluster ";
};

std::string scatter_plot(const std::vector<ScatterPoint>& points, const ScatterOptions& options);

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, const std::string& y_label = "");

// Rows are words, columns clusters; cell shade scales with the count.
std::string heatmap(const std::string& title, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& column_labels,
                    const std::vector<std::vector<std::size_t>>& counts);

std::string pie_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values);

}  // namespace drmine::svg
