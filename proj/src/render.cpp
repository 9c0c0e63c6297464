#include "stabledist/render.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <string>

namespace stabledist {

Palette Palette::standard() {
    return {{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22",
             "#393b79", "#637939", "#843c39"}};
}

namespace {

void require_coords(const Instance& inst) {
    if (!inst.graph().has_coords()) throw RenderError("graph has no node coordinates");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string render_svg(const Instance& inst, const Assignment& a, const SvgOptions& options) {
    require_coords(inst);
    const auto& g = inst.graph();
    const std::size_t n = g.node_count();
    if (a.match.size() != n) throw std::invalid_argument("render_svg: assignment size does not match graph");

    double min_x = g.coord(0).x, max_x = min_x, min_y = g.coord(0).y, max_y = min_y;
    for (const Point& p : g.coords()) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    double span = std::max(max_x - min_x, max_y - min_y);
    if (span <= 0) span = 1;
    const double scale = (options.width - 2 * options.margin) / span;
    const double width = 2 * options.margin + (max_x - min_x) * scale;
    const double height = 2 * options.margin + (max_y - min_y) * scale;
    auto sx = [&](const Point& p) { return fmt(options.margin + (p.x - min_x) * scale); };
    auto sy = [&](const Point& p) { return fmt(options.margin + (max_y - p.y) * scale); };

    const std::size_t k = inst.center_count();
    std::vector<std::string> district(k);
    std::string boundary;
    for (const Edge& e : g.edges()) {
        const Point& p = g.coord(e.u);
        const Point& q = g.coord(e.v);
        std::string& d = a.match[e.u] == a.match[e.v] ? district[a.match[e.u]] : boundary;
        d += 'M';
        d += sx(p) + ' ' + sy(p) + 'L' + sx(q) + ' ' + sy(q);
    }

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(width) + "\" height=\"" +
           fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + ' ' + fmt(height) + "\">\n";
    svg += "<g fill=\"none\" stroke-width=\"" + fmt(options.stroke_width) + "\" stroke-linecap=\"round\">\n";
    for (CenterIndex c = 0; c < k; ++c) {
        if (district[c].empty()) continue;
        svg += "<path class=\"district\" data-center=\"" + std::to_string(g.original_id(inst.center_node(c))) +
               "\" stroke=\"" + options.palette.color(c) + "\" d=\"" + district[c] + "\"/>\n";
    }
    if (!boundary.empty()) {
        svg += "<path class=\"boundary\" stroke=\"" + options.boundary_color + "\" d=\"" + boundary + "\"/>\n";
    }
    svg += "</g>\n<g class=\"centers\" stroke=\"#000000\" stroke-width=\"1\">\n";
    for (CenterIndex c = 0; c < k; ++c) {
        const Point& p = g.coord(inst.center_node(c));
        svg += "<circle data-center=\"" + std::to_string(g.original_id(inst.center_node(c))) + "\" cx=\"" + sx(p) +
               "\" cy=\"" + sy(p) + "\" r=\"" + fmt(options.marker_radius) + "\" fill=\"" + options.palette.color(c) +
               "\"/>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

std::string render_geojson(const Instance& inst, const Assignment& a, double coord_scale) {
    using nlohmann::ordered_json;
    require_coords(inst);
    const auto& g = inst.graph();
    if (a.match.size() != g.node_count()) throw std::invalid_argument("render_geojson: assignment size mismatch");

    auto point = [&](NodeId u) {
        const Point& p = g.coord(u);
        return ordered_json{{"type", "Point"}, {"coordinates", {p.x * coord_scale, p.y * coord_scale}}};
    };
    ordered_json features = ordered_json::array();
    for (NodeId u = 0; u < g.node_count(); ++u) {
        const CenterIndex c = a.match[u];
        features.push_back({{"type", "Feature"},
                            {"geometry", point(u)},
                            {"properties",
                             {{"node", g.original_id(u)},
                              {"center", g.original_id(inst.center_node(c))},
                              {"center_index", c},
                              {"distance", a.dist[u]}}}});
    }
    for (CenterIndex c = 0; c < inst.center_count(); ++c) {
        features.push_back({{"type", "Feature"},
                            {"geometry", point(inst.center_node(c))},
                            {"properties",
                             {{"role", "center"},
                              {"center", g.original_id(inst.center_node(c))},
                              {"center_index", c},
                              {"quota", inst.quota(c)}}}});
    }
    const ordered_json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
    return doc.dump() + "\n";
}

}  // namespace stabledist
