/**
 * @file geometry.hpp
 * @brief Planar domains with holes, built from analytic curve pieces, and the
 *        triangle mesh type shared by the solvers.
 *
 * Orientation convention: every boundary loop is traversed with the material
 * region on its left, i.e. the outer loop counterclockwise and holes
 * clockwise. Loop tag 0 is the outer loop, tag i >= 1 is hole i.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lineorient/errors.hpp"

namespace lineorient {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    Vec2 operator-() const { return {-x, -y}; }
    bool operator==(const Vec2&) const = default;

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const {
        const double r = norm();
        return {x / r, y / r};
    }
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double a, const Vec2& v) { return v * a; }

struct LineSegment {
    Vec2 a, b;
    /// Symmetry cut of a half-domain; removed when the mesh is mirrored.
    bool cut = false;
};

/// Arc of a circle from angle theta0 to theta1; counterclockwise iff theta1 > theta0.
struct CircularArc {
    Vec2 center;
    double radius = 1.0;
    double theta0 = 0.0, theta1 = 2.0 * std::numbers::pi;

    double sweep() const { return theta1 - theta0; }
};

using CurvePiece = std::variant<LineSegment, CircularArc>;

namespace detail {

inline double piece_length(const CurvePiece& p) {
    if (const auto* s = std::get_if<LineSegment>(&p)) return (s->b - s->a).norm();
    const auto& a = std::get<CircularArc>(p);
    return a.radius * std::abs(a.sweep());
}

inline Vec2 piece_point(const CurvePiece& p, double u) {
    if (const auto* s = std::get_if<LineSegment>(&p)) return s->a + (s->b - s->a) * u;
    const auto& a = std::get<CircularArc>(p);
    const double th = a.theta0 + u * a.sweep();
    return a.center + Vec2{std::cos(th), std::sin(th)} * a.radius;
}

inline Vec2 piece_tangent(const CurvePiece& p, double u) {
    if (const auto* s = std::get_if<LineSegment>(&p)) return (s->b - s->a).normalized();
    const auto& a = std::get<CircularArc>(p);
    const double th = a.theta0 + u * a.sweep();
    const Vec2 t{-std::sin(th), std::cos(th)};
    return a.sweep() > 0 ? t : -t;
}

/// Signed curvature, positive when the curve turns left.
inline double piece_curvature(const CurvePiece& p) {
    if (std::holds_alternative<LineSegment>(p)) return 0.0;
    const auto& a = std::get<CircularArc>(p);
    return a.sweep() > 0 ? 1.0 / a.radius : -1.0 / a.radius;
}

/// Nearest point parameter u in [0, 1] and its distance.
inline std::pair<double, double> piece_project(const CurvePiece& p, const Vec2& x) {
    if (const auto* s = std::get_if<LineSegment>(&p)) {
        const Vec2 d = s->b - s->a;
        const double l2 = d.dot(d);
        double u = l2 > 0 ? (x - s->a).dot(d) / l2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        return {u, (s->a + d * u - x).norm()};
    }
    const auto& a = std::get<CircularArc>(p);
    const double two_pi = 2.0 * std::numbers::pi;
    const double phi = std::atan2(x.y - a.center.y, x.x - a.center.x);
    double rel = a.sweep() > 0 ? phi - a.theta0 : a.theta0 - phi;
    rel = std::fmod(rel, two_pi);
    if (rel < 0) rel += two_pi;
    const double span = std::abs(a.sweep());
    double u;
    if (rel <= span + 1e-14) {
        u = std::min(rel / span, 1.0);
    } else {
        // Outside the angular range: snap to the closer endpoint.
        const double d0 = (piece_point(p, 0.0) - x).norm();
        const double d1 = (piece_point(p, 1.0) - x).norm();
        u = d0 <= d1 ? 0.0 : 1.0;
    }
    return {u, (piece_point(p, u) - x).norm()};
}

inline int winding_of_polyline(const std::vector<Vec2>& poly, const Vec2& p) {
    int wn = 0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const double side = (b - a).cross(p - a);
        if (a.y <= p.y) {
            if (b.y > p.y && side > 0) ++wn;
        } else {
            if (b.y <= p.y && side < 0) --wn;
        }
    }
    return wn;
}

inline double polyline_signed_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) a += poly[i].cross(poly[(i + 1) % poly.size()]);
    return 0.5 * a;
}

}  // namespace detail

/// A boundary sample: position and arc-length parameter t in [0, 1).
struct BoundarySample {
    Vec2 p;
    double t = 0.0;
};

/// Closed curve made of consecutive pieces, parameterized by normalized arc length.
class Loop {
public:
    Loop() = default;
    explicit Loop(std::vector<CurvePiece> pieces) : pieces_(std::move(pieces)) {
        if (pieces_.empty()) throw MeshingError("loop has no pieces");
        cumulative_.assign(1, 0.0);
        for (std::size_t k = 0; k < pieces_.size(); ++k) {
            cumulative_.push_back(cumulative_.back() + detail::piece_length(pieces_[k]));
            const Vec2 end = detail::piece_point(pieces_[k], 1.0);
            const Vec2 next = detail::piece_point(pieces_[(k + 1) % pieces_.size()], 0.0);
            if ((end - next).norm() > 1e-9) {
                throw MeshingError("loop pieces " + std::to_string(k) + " and " +
                                   std::to_string((k + 1) % pieces_.size()) + " do not connect");
            }
        }
    }

    static Loop circle(Vec2 center, double radius, bool clockwise) {
        const double two_pi = 2.0 * std::numbers::pi;
        return Loop({CircularArc{center, radius, 0.0, clockwise ? -two_pi : two_pi}});
    }

    const std::vector<CurvePiece>& pieces() const { return pieces_; }
    double length() const { return cumulative_.back(); }

    Vec2 point(double t) const {
        const auto [k, u] = locate(t);
        return detail::piece_point(pieces_[k], u);
    }

    /// Unit tangent in the direction of traversal; at a junction between
    /// pieces the two one-sided tangents are averaged (corner smoothing).
    Vec2 tangent(double t) const {
        const auto [k, u] = locate(t);
        const double len = detail::piece_length(pieces_[k]);
        const double eps = 1e-12 * std::max(1.0, length()) / std::max(len, 1e-300);
        if (u <= eps) {
            const auto& prev = pieces_[(k + pieces_.size() - 1) % pieces_.size()];
            return junction_tangent(prev, pieces_[k]);
        }
        if (u >= 1.0 - eps) {
            return junction_tangent(pieces_[k], pieces_[(k + 1) % pieces_.size()]);
        }
        return detail::piece_tangent(pieces_[k], u);
    }

    double curvature(double t) const { return detail::piece_curvature(pieces_[locate(t).first]); }

    /// Parameter of the nearest point on the curve.
    double project(const Vec2& p) const {
        double best = std::numeric_limits<double>::infinity();
        double best_t = 0.0;
        for (std::size_t k = 0; k < pieces_.size(); ++k) {
            const auto [u, d] = detail::piece_project(pieces_[k], p);
            if (d < best - 1e-15) {
                best = d;
                best_t = (cumulative_[k] + u * (cumulative_[k + 1] - cumulative_[k])) / length();
            }
        }
        if (best_t >= 1.0) best_t -= 1.0;
        return best_t;
    }

    /// Samples with spacing at most `spacing`, every piece endpoint included,
    /// arcs split so the chord sagitta stays below `sagitta`.
    std::vector<BoundarySample> sample(double spacing, int min_arc_segments = 0,
                                       double sagitta = std::numeric_limits<double>::infinity()) const {
        std::vector<BoundarySample> out;
        for (std::size_t k = 0; k < pieces_.size(); ++k) {
            const double len = cumulative_[k + 1] - cumulative_[k];
            int n = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
            if (const auto* arc = std::get_if<CircularArc>(&pieces_[k])) {
                n = std::max({n, min_arc_segments, 3});
                if (std::isfinite(sagitta)) {
                    const double max_chord = std::sqrt(8.0 * arc->radius * sagitta);
                    n = std::max(n, static_cast<int>(std::ceil(len / max_chord)));
                }
            }
            for (int j = 0; j < n; ++j) {
                const double u = static_cast<double>(j) / n;
                out.push_back({detail::piece_point(pieces_[k], u),
                               (cumulative_[k] + u * len) / length()});
            }
        }
        return out;
    }

    /// Dense polyline used for point-in-region tests.
    const std::vector<Vec2>& dense_polyline() const {
        if (dense_.empty()) {
            for (const auto& s : sample(length() / 2048.0, 256)) dense_.push_back(s.p);
        }
        return dense_;
    }

    int winding(const Vec2& p) const { return detail::winding_of_polyline(dense_polyline(), p); }
    double signed_area() const { return detail::polyline_signed_area(dense_polyline()); }
    bool has_cut() const {
        return std::any_of(pieces_.begin(), pieces_.end(), [](const CurvePiece& p) {
            const auto* s = std::get_if<LineSegment>(&p);
            return s && s->cut;
        });
    }
    /// True when parameter t falls on a cut segment.
    bool on_cut(double t) const {
        const auto* s = std::get_if<LineSegment>(&pieces_[locate(t).first]);
        return s && s->cut;
    }

private:
    std::pair<std::size_t, double> locate(double t) const {
        t -= std::floor(t);
        const double target = t * length();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
        std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - cumulative_.begin() - 1, 0),
                                              pieces_.size() - 1);
        const double len = cumulative_[k + 1] - cumulative_[k];
        const double u = len > 0 ? std::clamp((target - cumulative_[k]) / len, 0.0, 1.0) : 0.0;
        return {k, u};
    }

    static Vec2 junction_tangent(const CurvePiece& before, const CurvePiece& after) {
        const Vec2 avg = detail::piece_tangent(before, 1.0) + detail::piece_tangent(after, 0.0);
        if (avg.norm() < 1e-12) return detail::piece_tangent(after, 0.0);
        return avg.normalized();
    }

    std::vector<CurvePiece> pieces_;
    std::vector<double> cumulative_;
    mutable std::vector<Vec2> dense_;
};

/// Outer loop minus holes 1..n. Outer counterclockwise, holes clockwise.
struct DomainSpec {
    std::string name;
    Loop outer;
    std::vector<Loop> holes;

    std::size_t hole_count() const { return holes.size(); }
    const Loop& loop(int tag) const { return tag == 0 ? outer : holes.at(tag - 1); }

    bool contains(const Vec2& p) const {
        if (outer.winding(p) == 0) return false;
        return std::none_of(holes.begin(), holes.end(), [&](const Loop& h) { return h.winding(p) != 0; });
    }

    double area() const {
        double a = outer.signed_area();
        for (const auto& h : holes) a += h.signed_area();
        return a;
    }

    /// Orientation, nesting and disjointness checks on dense samples.
    void validate() const {
        if (outer.signed_area() <= 0) throw MeshingError(name + ": outer loop must be counterclockwise");
        for (std::size_t i = 0; i < holes.size(); ++i) {
            const std::string label = name + ": hole " + std::to_string(i + 1);
            if (holes[i].signed_area() >= 0) throw MeshingError(label + " must be clockwise");
            for (const Vec2& p : holes[i].dense_polyline()) {
                if (outer.winding(p) == 0) throw MeshingError(label + " is not inside the outer loop");
                for (std::size_t j = 0; j < holes.size(); ++j) {
                    if (j != i && holes[j].winding(p) != 0) {
                        throw MeshingError(label + " intersects hole " + std::to_string(j + 1));
                    }
                }
            }
            for (const Vec2& p : outer.dense_polyline()) {
                if (holes[i].winding(p) != 0) throw MeshingError(label + " crosses the outer loop");
            }
        }
    }
};

struct BoundaryEdge {
    int a = 0, b = 0;  ///< material lies to the left of a -> b
    int loop = 0;      ///< 0 = outer, i >= 1 = hole i
};

/// Triangle mesh with counterclockwise triangles and tagged boundary edges.
struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    double h = 0.0;
    int hole_count = 0;

    std::size_t node_count() const { return nodes.size(); }

    /// Nodes of one boundary loop in traversal order, starting at its lowest index.
    std::vector<int> loop_nodes(int loop) const {
        std::map<int, int> next;
        for (const auto& e : boundary_edges) {
            if (e.loop == loop) next[e.a] = e.b;
        }
        if (next.empty()) return {};
        std::vector<int> out;
        const int start = next.begin()->first;
        int v = start;
        do {
            out.push_back(v);
            auto it = next.find(v);
            if (it == next.end()) throw MeshingError("boundary loop " + std::to_string(loop) + " is open");
            v = it->second;
            if (out.size() > next.size()) throw MeshingError("boundary loop " + std::to_string(loop) + " is not simple");
        } while (v != start);
        if (out.size() != next.size()) {
            throw MeshingError("boundary loop " + std::to_string(loop) + " has several components");
        }
        return out;
    }

    /// Per-node loop tag: -1 for interior nodes.
    std::vector<int> node_loops() const {
        std::vector<int> tag(nodes.size(), -1);
        for (const auto& e : boundary_edges) {
            tag[e.a] = e.loop;
            tag[e.b] = e.loop;
        }
        return tag;
    }

    /// Unique undirected edges (u < v), sorted.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(triangles.size() * 3);
        for (const auto& t : triangles) {
            for (int k = 0; k < 3; ++k) {
                const int u = t[k], v = t[(k + 1) % 3];
                out.emplace_back(std::min(u, v), std::max(u, v));
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    double triangle_area(std::size_t t) const {
        const auto& tri = triangles[t];
        return 0.5 * (nodes[tri[1]] - nodes[tri[0]]).cross(nodes[tri[2]] - nodes[tri[0]]);
    }

    Vec2 centroid(std::size_t t) const {
        const auto& tri = triangles[t];
        return (nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]]) * (1.0 / 3.0);
    }

    double min_angle_degrees() const {
        double worst = 180.0;
        for (const auto& tri : triangles) {
            for (int k = 0; k < 3; ++k) {
                const Vec2 a = nodes[tri[(k + 1) % 3]] - nodes[tri[k]];
                const Vec2 b = nodes[tri[(k + 2) % 3]] - nodes[tri[k]];
                const double ang = std::atan2(std::abs(a.cross(b)), a.dot(b));
                worst = std::min(worst, ang * 180.0 / std::numbers::pi);
            }
        }
        return worst;
    }

    /// Structural checks: positive areas, every boundary edge in exactly one
    /// triangle with matching orientation, closed simple loops.
    void check() const {
        std::map<std::pair<int, int>, int> directed;
        for (std::size_t t = 0; t < triangles.size(); ++t) {
            if (!(triangle_area(t) > 0)) throw MeshingError("triangle " + std::to_string(t) + " is not counterclockwise");
            const auto& tri = triangles[t];
            for (int k = 0; k < 3; ++k) ++directed[{tri[k], tri[(k + 1) % 3]}];
        }
        for (const auto& e : boundary_edges) {
            if (directed[{e.a, e.b}] != 1 || directed.count({e.b, e.a}) != 0) {
                throw MeshingError("boundary edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                                   ") does not belong to exactly one triangle");
            }
        }
        for (int loop = 0; loop <= hole_count; ++loop) (void)loop_nodes(loop);
    }
};

namespace preset {

inline DomainSpec disk(double radius = 1.0) {
    if (!(radius > 0)) throw ConfigError("disk radius must be positive");
    return {"disk", Loop::circle({0, 0}, radius, false), {}};
}

inline DomainSpec annulus(double inner = 0.5, double outer = 1.0) {
    if (!(inner > 0 && inner < outer)) throw ConfigError("annulus needs 0 < inner < outer");
    return {"annulus", Loop::circle({0, 0}, outer, false), {Loop::circle({0, 0}, inner, true)}};
}

inline Loop stadium_outer(double delta) {
    const double pi = std::numbers::pi;
    return Loop({LineSegment{{1, -delta}, {1, delta}}, CircularArc{{0, delta}, 1.0, 0.0, pi},
                 LineSegment{{-1, delta}, {-1, -delta}}, CircularArc{{0, -delta}, 1.0, pi, 2 * pi}});
}

/// Two unit half-disks centred at (0, +-delta) joined by the strip |x1| < 1,
/// minus the disks of radius sqrt(1/2) at (0, delta) (hole 1) and (0, -delta) (hole 2).
inline DomainSpec stadium(double delta) {
    if (!(delta > 1.0)) throw ConfigError("stadium needs delta > 1");
    const double r = std::sqrt(0.5);
    return {"stadium", stadium_outer(delta),
            {Loop::circle({0, delta}, r, true), Loop::circle({0, -delta}, r, true)}};
}

/// Upper half of the stadium (x2 > 0), closed by a cut segment on x2 = 0.
inline DomainSpec stadium_upper_half(double delta) {
    if (!(delta > 1.0)) throw ConfigError("stadium needs delta > 1");
    const double pi = std::numbers::pi;
    Loop outer({LineSegment{{-1, 0}, {1, 0}, true}, LineSegment{{1, 0}, {1, delta}},
                CircularArc{{0, delta}, 1.0, 0.0, pi}, LineSegment{{-1, delta}, {-1, 0}}});
    return {"stadium_upper_half", outer, {Loop::circle({0, delta}, std::sqrt(0.5), true)}};
}

/// Stadium with delta = 2 whose upper hole has radius sqrt(rho). Hole 1 is the
/// fixed hole at (0, -2), hole 2 the shrinking hole at (0, 2).
inline DomainSpec stadium_asym(double rho) {
    if (!(rho > 0 && rho < 1)) throw ConfigError("stadium_asym needs 0 < rho < 1");
    return {"stadium_asym", stadium_outer(2.0),
            {Loop::circle({0, -2.0}, std::sqrt(0.5), true), Loop::circle({0, 2.0}, std::sqrt(rho), true)}};
}

/// Annulus 1/2 < r < 1 minus a disk of the given radius around (0, 3/4).
/// Hole 1 is the small disk, hole 2 the inner circle.
inline DomainSpec offset_annulus(double hole_radius) {
    if (!(hole_radius > 0 && hole_radius < 0.25)) throw ConfigError("offset_annulus needs 0 < hole radius < 1/4");
    return {"offset_annulus", Loop::circle({0, 0}, 1.0, false),
            {Loop::circle({0, 0.75}, hole_radius, true), Loop::circle({0, 0}, 0.5, true)}};
}

/// Square [-1,1] x [-1,0] glued to the upper half-disk of radius 1, minus the disk r < 1/2.
inline DomainSpec horseshoe() {
    const double pi = std::numbers::pi;
    Loop outer({LineSegment{{-1, -1}, {1, -1}}, LineSegment{{1, -1}, {1, 0}}, CircularArc{{0, 0}, 1.0, 0.0, pi},
                LineSegment{{-1, 0}, {-1, -1}}});
    return {"horseshoe", outer, {Loop::circle({0, 0}, 0.5, true)}};
}

inline DomainSpec square(double half = 1.0) {
    if (!(half > 0)) throw ConfigError("square half-width must be positive");
    Loop outer({LineSegment{{-half, -half}, {half, -half}}, LineSegment{{half, -half}, {half, half}},
                LineSegment{{half, half}, {-half, half}}, LineSegment{{-half, half}, {-half, -half}}});
    return {"square", outer, {}};
}

/// Disk of radius 2 with three holes of radius 0.3 at distance 1 from the centre.
inline DomainSpec three_hole_disk() {
    std::vector<Loop> holes;
    for (int k = 0; k < 3; ++k) {
        const double phi = std::numbers::pi / 2 + k * 2.0 * std::numbers::pi / 3.0;
        holes.push_back(Loop::circle({std::cos(phi), std::sin(phi)}, 0.3, true));
    }
    return {"three_hole_disk", Loop::circle({0, 0}, 2.0, false), std::move(holes)};
}

/// Named preset with its single numeric parameter (ignored where unused).
inline DomainSpec by_name(const std::string& name, std::optional<double> param = std::nullopt) {
    if (name == "disk") return disk(param.value_or(1.0));
    if (name == "annulus") return annulus(param.value_or(0.5));
    if (name == "stadium") return stadium(param.value_or(2.0));
    if (name == "stadium_asym") return stadium_asym(param.value_or(0.5));
    if (name == "offset_annulus") return offset_annulus(param.value_or(0.1));
    if (name == "horseshoe") return horseshoe();
    if (name == "square") return square(param.value_or(1.0));
    if (name == "three_hole_disk") return three_hole_disk();
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace preset

}  // namespace lineorient
