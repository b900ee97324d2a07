#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <span>
#include <string>

#include "lineorient/geometry.hpp"
#include "lineorient/tensor.hpp"

namespace lineorient {

/// SVG 1.1 plot of a nodal line field: one segment per triangle, centred at
/// the centroid, along the director of the averaged Q, of length 0.8 h.
inline std::string line_field_svg(const Mesh& mesh, std::span<const QTensor2> q, const std::string& title = "") {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Vec2& p : mesh.nodes) {
        xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
    }
    const double span = std::max(xmax - xmin, ymax - ymin);
    const double margin = 0.05 * span;
    const double scale = 800.0 / (span + 2 * margin);
    const double width = (xmax - xmin + 2 * margin) * scale, height = (ymax - ymin + 2 * margin) * scale;
    auto X = [&](double x) { return (x - xmin + margin) * scale; };
    auto Y = [&](double y) { return (ymax - y + margin) * scale; };
    std::ostringstream out;
    out.precision(6);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    if (!title.empty()) out << "<title>" << title << "</title>\n";
    out << "<g stroke=\"#888\" stroke-width=\"1.5\">\n";
    for (const auto& e : mesh.boundary_edges) {
        const Vec2 &a = mesh.nodes[e.a], &b = mesh.nodes[e.b];
        out << "<line x1=\"" << X(a.x) << "\" y1=\"" << Y(a.y) << "\" x2=\"" << X(b.x) << "\" y2=\"" << Y(b.y)
            << "\"/>\n";
    }
    out << "</g>\n<g stroke=\"#1f4e9c\" stroke-width=\"1\">\n";
    const double half = 0.4 * mesh.h;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        QTensor2 avg{0, 0, q[tri[0]].s};
        for (int k = 0; k < 3; ++k) avg.q11 += q[tri[k]].q11 / 3.0, avg.q12 += q[tri[k]].q12 / 3.0;
        const Director2 n = director(avg);
        const Vec2 c = mesh.centroid(t);
        out << "<line x1=\"" << X(c.x - half * n.n1) << "\" y1=\"" << Y(c.y - half * n.n2) << "\" x2=\""
            << X(c.x + half * n.n1) << "\" y2=\"" << Y(c.y + half * n.n2) << "\"/>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

}  // namespace lineorient
