#pragma once

#include "stabledist/model.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace stabledist {

class RenderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// District colors, assigned by center index modulo the palette size.
struct Palette {
    std::vector<std::string> colors;

    const std::string& color(CenterIndex c) const { return colors[c % colors.size()]; }
    static Palette standard();
};

struct SvgOptions {
    double width = 1000;
    double margin = 10;
    double stroke_width = 1;
    double marker_radius = 5;
    Palette palette = Palette::standard();
    std::string boundary_color = "#9e9e9e";
};

/**
 * District map as an SVG 1.1 document.
 *
 * One path per district holds the edges whose endpoints share that district;
 * edges between districts go into a single gray boundary path. Centers are
 * drawn as filled circles. The y axis is flipped so north is up. Output bytes
 * depend only on the inputs.
 */
std::string render_svg(const Instance& inst, const Assignment& a, const SvgOptions& options = {});

// FeatureCollection with one Point per node ({node, center, center_index,
// distance}) followed by one Point per center ({role: "center", center,
// center_index, quota}). Coordinates are multiplied by coord_scale.
std::string render_geojson(const Instance& inst, const Assignment& a, double coord_scale = 1.0);

}  // namespace stabledist
