#pragma once

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "instance.hpp"
#include "solution.hpp"

namespace cegrp {

namespace detail {

struct PlotFrame {
    double min_x = 0.0;
    double max_y = 0.0;
    double scale = 1.0;
    double margin = 40.0;

    double x(double wx) const { return margin + (wx - min_x) * scale; }
    double y(double wy) const { return margin + (max_y - wy) * scale; }
};

inline const char* route_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[i % (sizeof palette / sizeof palette[0])];
}

}  // namespace detail

// Renders the instance and its routes as a standalone vector graphic:
// required edges as bold segments, node neighborhoods as dashed circles
// (only when the radius is positive), one colored polyline per route and a
// square depot marker on top. Pass the optimized points to draw the routes
// through them; without points the polylines run through the centers.
inline std::string plot_solution(const Solution& sol, const PointAssignment* points,
                                 const Instance& inst) {
    double min_x = inst.depot.x, max_x = inst.depot.x;
    double min_y = inst.depot.y, max_y = inst.depot.y;
    auto grow = [&](double x, double y, double pad = 0.0) {
        min_x = std::min(min_x, x - pad);
        max_x = std::max(max_x, x + pad);
        min_y = std::min(min_y, y - pad);
        max_y = std::max(max_y, y + pad);
    };
    for (const auto& n : inst.nodes) grow(n.center.x, n.center.y, n.radius);
    for (const auto& e : inst.edges) {
        grow(e.a.x, e.a.y);
        grow(e.b.x, e.b.y);
    }
    if (points)
        for (const auto& r : points->routes)
            for (const auto& p : r) grow(p.x, p.y);

    const double span_x = std::max(max_x - min_x, 1.0);
    const double span_y = std::max(max_y - min_y, 1.0);
    detail::PlotFrame f;
    f.min_x = min_x;
    f.max_y = max_y;
    f.scale = std::min((800.0 - 2 * f.margin) / span_x, (800.0 - 2 * f.margin) / span_y);
    const double width = span_x * f.scale + 2 * f.margin;
    const double height = span_y * f.scale + 2 * f.margin;

    std::ostringstream svg;
    svg << std::fixed << std::setprecision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (const auto& e : inst.edges)
        svg << "<line class=\"edge\" x1=\"" << f.x(e.a.x) << "\" y1=\"" << f.y(e.a.y)
            << "\" x2=\"" << f.x(e.b.x) << "\" y2=\"" << f.y(e.b.y)
            << "\" stroke=\"#333333\" stroke-width=\"3\"/>\n";

    for (const auto& n : inst.nodes) {
        if (n.radius > 0.0)
            svg << "<circle class=\"disk\" cx=\"" << f.x(n.center.x) << "\" cy=\""
                << f.y(n.center.y) << "\" r=\"" << n.radius * f.scale
                << "\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"6 4\"/>\n";
        svg << "<circle class=\"node\" cx=\"" << f.x(n.center.x) << "\" cy=\"" << f.y(n.center.y)
            << "\" r=\"3\" fill=\"#555555\"/>\n";
    }

    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        std::vector<Point2> line;
        if (points && r < points->routes.size()) {
            line = points->routes[r];
        } else {
            for (const auto& d : vertex_sequence(sol.routes[r], inst)) line.push_back(d.center);
        }
        svg << "<polyline class=\"route\" fill=\"none\" stroke=\"" << detail::route_color(r)
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) svg << ' ';
            svg << f.x(line[i].x) << ',' << f.y(line[i].y);
        }
        svg << "\"/>\n";
    }

    svg << "<rect class=\"depot\" x=\"" << f.x(inst.depot.x) - 5 << "\" y=\""
        << f.y(inst.depot.y) - 5 << "\" width=\"10\" height=\"10\" fill=\"#000000\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace cegrp
