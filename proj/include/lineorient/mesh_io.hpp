/**
 * @file mesh_io.hpp
 * @brief Plain-text mesh files with 1-based indices:
 *   stem.node  "count" then "index x y tag" (tag 0 interior, 1 outer, i+1 hole i)
 *   stem.ele   "count" then "index v1 v2 v3"
 *   stem.edge  "v1 v2 loop_tag" per boundary edge (loop 0 outer, i hole i)
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include "lineorient/geometry.hpp"
#include "lineorient/io.hpp"

namespace lineorient {

namespace detail {
inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Next non-empty, non-comment line split into numbers.
inline bool next_record(std::istream& in, std::vector<double>& out) {
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        out.clear();
        double x;
        while (ss >> x) out.push_back(x);
        if (!ss.eof()) throw DataError("malformed mesh record: '" + line + "'");
        if (!out.empty()) return true;
    }
    return false;
}
}  // namespace detail

inline void write_mesh(const Mesh& mesh, const std::filesystem::path& stem) {
    const auto loops = mesh.node_loops();
    std::ostringstream node, ele, edge;
    node << mesh.nodes.size() << "\n";
    for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
        node << v + 1 << ' ' << detail::fmt_double(mesh.nodes[v].x) << ' ' << detail::fmt_double(mesh.nodes[v].y)
             << ' ' << loops[v] + 1 << "\n";
    }
    ele << mesh.triangles.size() << "\n";
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        ele << t + 1 << ' ' << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1 << "\n";
    }
    for (const auto& e : mesh.boundary_edges) edge << e.a + 1 << ' ' << e.b + 1 << ' ' << e.loop << "\n";
    auto with_ext = [&](const char* ext) {
        std::filesystem::path p = stem;
        p += ext;
        return p;
    };
    write_atomic(with_ext(".node"), node.str());
    write_atomic(with_ext(".ele"), ele.str());
    write_atomic(with_ext(".edge"), edge.str());
}

/// Reads the three files written by write_mesh. A leading count line is
/// accepted but not required in the edge file. h is set to the mean edge length.
inline Mesh read_mesh(const std::filesystem::path& stem) {
    auto open = [&](const char* ext) {
        std::filesystem::path p = stem;
        p += ext;
        return std::istringstream(read_text(p));
    };
    Mesh mesh;
    std::vector<double> rec;
    {
        auto in = open(".node");
        if (!detail::next_record(in, rec)) throw DataError("empty node file");
        const auto count = static_cast<std::size_t>(rec[0]);
        for (std::size_t k = 0; k < count; ++k) {
            if (!detail::next_record(in, rec) || rec.size() < 3) throw DataError("truncated node file");
            if (static_cast<std::size_t>(rec[0]) != k + 1) throw DataError("node indices must be consecutive from 1");
            mesh.nodes.push_back({rec[1], rec[2]});
        }
    }
    {
        auto in = open(".ele");
        if (!detail::next_record(in, rec)) throw DataError("empty element file");
        const auto count = static_cast<std::size_t>(rec[0]);
        for (std::size_t k = 0; k < count; ++k) {
            if (!detail::next_record(in, rec) || rec.size() < 4) throw DataError("truncated element file");
            std::array<int, 3> tri{};
            for (int j = 0; j < 3; ++j) {
                tri[j] = static_cast<int>(rec[j + 1]) - 1;
                if (tri[j] < 0 || tri[j] >= static_cast<int>(mesh.nodes.size())) {
                    throw DataError("element " + std::to_string(k + 1) + " references a missing node");
                }
            }
            mesh.triangles.push_back(tri);
        }
    }
    {
        auto in = open(".edge");
        while (detail::next_record(in, rec)) {
            if (rec.size() == 1 || rec.size() == 2) continue;  // count header
            if (rec.size() != 3) throw DataError("edge records must be 'v1 v2 loop_tag'");
            const int a = static_cast<int>(rec[0]) - 1, b = static_cast<int>(rec[1]) - 1;
            const int loop = static_cast<int>(rec[2]);
            if (a < 0 || b < 0 || a >= static_cast<int>(mesh.nodes.size()) || b >= static_cast<int>(mesh.nodes.size())) {
                throw DataError("boundary edge references a missing node");
            }
            mesh.boundary_edges.push_back({a, b, loop});
            mesh.hole_count = std::max(mesh.hole_count, loop);
        }
    }
    const auto edges = mesh.edges();
    double total = 0.0;
    for (const auto& [a, b] : edges) total += (mesh.nodes[a] - mesh.nodes[b]).norm();
    mesh.h = edges.empty() ? 0.0 : total / edges.size();
    mesh.check();
    return mesh;
}

}  // namespace lineorient
