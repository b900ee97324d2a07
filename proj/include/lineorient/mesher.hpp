/**
 * @file mesher.hpp
 * @brief Constrained Delaunay triangulation of a DomainSpec with Ruppert-style
 *        refinement (minimum angle and size bounds).
 *
 * Boundary loops are sampled into polylines first. The triangulation is built
 * incrementally inside a large super triangle with Lawson edge flips; boundary
 * segments are recovered by midpoint splitting and then kept fixed. Regions
 * bounded by segments are classified as inside or outside the domain, and the
 * inside region is refined by inserting circumcenters of poor triangles,
 * splitting encroached segments instead whenever a circumcenter would
 * encroach on one.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numbers>
#include <span>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "lineorient/errors.hpp"
#include "lineorient/geometry.hpp"

namespace lineorient {

struct MeshOptions {
    /// Minimum interior angle (degrees) enforced by refinement; Ruppert's
    /// algorithm terminates for bounds up to about 20.7 degrees.
    double min_angle_degrees = 20.0;
    /// Triangles with an edge longer than size_factor * h are split.
    double size_factor = 1.5;
    /// Lower bound on segments per circular arc.
    int min_arc_segments = 0;
    /// Lower bound on edges per boundary loop.
    int min_loop_edges = 16;
    std::size_t max_vertices = 3'000'000;
};

namespace detail {

inline long double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    const long double abx = static_cast<long double>(b.x) - a.x;
    const long double aby = static_cast<long double>(b.y) - a.y;
    const long double acx = static_cast<long double>(c.x) - a.x;
    const long double acy = static_cast<long double>(c.y) - a.y;
    return abx * acy - aby * acx;
}

/// Positive iff d lies inside the circumcircle of the counterclockwise triangle abc.
inline long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const long double adx = static_cast<long double>(a.x) - d.x, ady = static_cast<long double>(a.y) - d.y;
    const long double bdx = static_cast<long double>(b.x) - d.x, bdy = static_cast<long double>(b.y) - d.y;
    const long double cdx = static_cast<long double>(c.x) - d.x, cdy = static_cast<long double>(c.y) - d.y;
    const long double ad = adx * adx + ady * ady;
    const long double bd = bdx * bdx + bdy * bdy;
    const long double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

inline Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 ab = b - a, ac = c - a;
    const double d = 2.0 * ab.cross(ac);
    const double ab2 = ab.dot(ab), ac2 = ac.dot(ac);
    return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

/// p lies strictly inside the circle with diameter ab.
inline bool encroaches(const Vec2& p, const Vec2& a, const Vec2& b) { return (a - p).dot(b - p) < 0.0; }

class DelaunayRefiner {
public:
    DelaunayRefiner(const DomainSpec& spec, double h, const MeshOptions& opt) : spec_(spec), h_(h), opt_(opt) {
        const double s = std::sin(opt.min_angle_degrees * std::numbers::pi / 180.0);
        max_ratio_ = 1.0 / (2.0 * s);
    }

    Mesh run() {
        build_boundary();
        recover_segments();
        classify_regions();
        refine();
        return extract();
    }

    /// Outer-loop boundary edges lying on the symmetry cut (both ends at y == 0).
    static bool on_cut(const Mesh& m, const BoundaryEdge& e) {
        return e.loop == 0 && m.nodes[e.a].y == 0.0 && m.nodes[e.b].y == 0.0;
    }

private:
    struct Tri {
        std::array<int, 3> v{};
        std::array<int, 3> nb{-1, -1, -1};  ///< neighbour across the edge opposite v[k]
        std::array<bool, 3> seg{};
        bool inside = false;
    };
    struct TriKey {
        int t;
        std::array<int, 3> v;
    };

    static std::uint64_t key(int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    }

    int add_vertex(const Vec2& p, int loop) {
        if (pts_.size() >= opt_.max_vertices) {
            throw MeshingError(spec_.name + ": vertex budget exhausted during refinement");
        }
        pts_.push_back(p);
        vloop_.push_back(loop);
        vtri_.push_back(-1);
        return static_cast<int>(pts_.size()) - 1;
    }

    int new_tri() {
        tris_.emplace_back();
        return static_cast<int>(tris_.size()) - 1;
    }

    void replace_neighbor(int u, int old_t, int new_t) {
        if (u < 0) return;
        for (int k = 0; k < 3; ++k) {
            if (tris_[u].nb[k] == old_t) {
                tris_[u].nb[k] = new_t;
                return;
            }
        }
    }

    int index_of(int t, int vert) const {
        for (int k = 0; k < 3; ++k) {
            if (tris_[t].v[k] == vert) return k;
        }
        return -1;
    }

    int nb_index(int u, int t) const {
        for (int k = 0; k < 3; ++k) {
            if (tris_[u].nb[k] == t) return k;
        }
        throw MeshingError("corrupt triangle adjacency");
    }

    const Vec2& P(int v) const { return pts_[v]; }

    void build_boundary() {
        spec_.validate();
        // Super triangle around the bounding box.
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const Vec2& p : spec_.outer.dense_polyline()) {
            xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
        }
        const Vec2 c{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
        const double r = 50.0 * std::max({xmax - xmin, ymax - ymin, h_});
        add_vertex(c + Vec2{-r, -r}, -1);
        add_vertex(c + Vec2{r, -r}, -1);
        add_vertex(c + Vec2{0.0, r}, -1);
        const int t = new_tri();
        tris_[t].v = {0, 1, 2};
        for (int k = 0; k < 3; ++k) vtri_[k] = t;

        for (int loop = 0; loop <= static_cast<int>(spec_.hole_count()); ++loop) {
            const Loop& curve = spec_.loop(loop);
            const double spacing = std::min(h_, curve.length() / opt_.min_loop_edges);
            const auto samples = curve.sample(spacing, opt_.min_arc_segments, h_ * h_);
            std::vector<int> ids;
            for (const auto& s : samples) {
                const int v = add_vertex(s.p, loop);
                insert(v, vtri_[v - 1] >= 0 ? vtri_[v - 1] : 0);
                ids.push_back(v);
            }
            for (std::size_t k = 0; k < ids.size(); ++k) {
                pending_.push_back({ids[k], ids[(k + 1) % ids.size()], loop});
            }
        }
    }

    // --- point location and insertion -------------------------------------------------

    std::pair<int, int> locate(const Vec2& p, int start) const {
        int t = start;
        const std::size_t cap = 4 * tris_.size() + 64;
        for (std::size_t step = 0; step < cap; ++step) {
            const Tri& T = tris_[t];
            bool moved = false;
            const int off = static_cast<int>(step % 3);
            int on_edge = -1;
            for (int kk = 0; kk < 3; ++kk) {
                const int k = (kk + off) % 3;
                const long double o = orient2d(P(T.v[(k + 1) % 3]), P(T.v[(k + 2) % 3]), p);
                if (o < 0) {
                    t = T.nb[k];
                    moved = true;
                    break;
                }
                if (o == 0) on_edge = k;
            }
            if (t < 0) break;
            if (!moved) return {t, on_edge};
        }
        // Walk failed (cycling on round-off); fall back to an exhaustive scan.
        for (int u = 0; u < static_cast<int>(tris_.size()); ++u) {
            const Tri& T = tris_[u];
            int on_edge = -1;
            bool in = true;
            for (int k = 0; k < 3 && in; ++k) {
                const long double o = orient2d(P(T.v[(k + 1) % 3]), P(T.v[(k + 2) % 3]), p);
                if (o < 0) in = false;
                if (o == 0) on_edge = k;
            }
            if (in) return {u, on_edge};
        }
        throw MeshingError(spec_.name + ": point location failed");
    }

    void insert(int v, int start) {
        const auto [t, edge] = locate(P(v), start);
        insert_at(v, t, edge);
    }

    void insert_at(int v, int t, int edge) {
        if (edge < 0) {
            split3(t, v);
        } else {
            split4(t, edge, v);
        }
        legalize();
    }

    void split3(int t, int p) {
        const Tri T = tris_[t];
        const int a = T.v[0], b = T.v[1], c = T.v[2];
        const int t0 = t, t1 = new_tri(), t2 = new_tri();
        tris_[t0] = Tri{{a, b, p}, {t1, t2, T.nb[2]}, {false, false, T.seg[2]}, T.inside};
        tris_[t1] = Tri{{b, c, p}, {t2, t0, T.nb[0]}, {false, false, T.seg[0]}, T.inside};
        tris_[t2] = Tri{{c, a, p}, {t0, t1, T.nb[1]}, {false, false, T.seg[1]}, T.inside};
        replace_neighbor(T.nb[0], t, t1);
        replace_neighbor(T.nb[1], t, t2);
        vtri_[a] = t0, vtri_[b] = t1, vtri_[c] = t2, vtri_[p] = t0;
        stack_.push_back({t0, 2});
        stack_.push_back({t1, 2});
        stack_.push_back({t2, 2});
    }

    void split4(int t, int k, int p) {
        const Tri T = tris_[t];
        const int o = T.v[k], e1 = T.v[(k + 1) % 3], e2 = T.v[(k + 2) % 3];
        const int u = T.nb[k];
        if (u < 0) throw MeshingError(spec_.name + ": point on the super triangle hull");
        const Tri U = tris_[u];
        const int j = nb_index(u, t);
        const int o2 = U.v[j];
        const bool S = T.seg[k];
        const int n_oe1 = T.nb[(k + 2) % 3], n_e2o = T.nb[(k + 1) % 3];
        const bool s_oe1 = T.seg[(k + 2) % 3], s_e2o = T.seg[(k + 1) % 3];
        const int n_o2e2 = U.nb[(j + 2) % 3], n_e1o2 = U.nb[(j + 1) % 3];
        const bool s_o2e2 = U.seg[(j + 2) % 3], s_e1o2 = U.seg[(j + 1) % 3];
        const int A = t, B = new_tri(), C = u, D = new_tri();
        tris_[A] = Tri{{o, e1, p}, {D, B, n_oe1}, {S, false, s_oe1}, T.inside};
        tris_[B] = Tri{{o, p, e2}, {C, n_e2o, A}, {S, s_e2o, false}, T.inside};
        tris_[C] = Tri{{o2, e2, p}, {B, D, n_o2e2}, {S, false, s_o2e2}, U.inside};
        tris_[D] = Tri{{o2, p, e1}, {A, n_e1o2, C}, {S, s_e1o2, false}, U.inside};
        replace_neighbor(n_e2o, t, B);
        replace_neighbor(n_e1o2, u, D);
        vtri_[o] = A, vtri_[e1] = A, vtri_[e2] = B, vtri_[o2] = C, vtri_[p] = A;
        if (S) {
            const int loop = segments_.at(key(e1, e2));
            segments_.erase(key(e1, e2));
            segments_[key(e1, p)] = loop;
            segments_[key(p, e2)] = loop;
        }
        stack_.push_back({A, 2});
        stack_.push_back({B, 1});
        stack_.push_back({C, 2});
        stack_.push_back({D, 1});
    }

    /// Lawson flips of the edges opposite the newly inserted vertex.
    void legalize() {
        while (!stack_.empty()) {
            const auto [t, i] = stack_.back();
            stack_.pop_back();
            const Tri T = tris_[t];
            if (T.seg[i] || T.nb[i] < 0) continue;
            const int u = T.nb[i];
            const Tri U = tris_[u];
            const int j = nb_index(u, t);
            const int d = U.v[j];
            if (incircle(P(T.v[0]), P(T.v[1]), P(T.v[2]), P(d)) <= 0) continue;
            const int o = T.v[i], e1 = T.v[(i + 1) % 3], e2 = T.v[(i + 2) % 3];
            const int n_oe1 = T.nb[(i + 2) % 3], n_e2o = T.nb[(i + 1) % 3];
            const bool s_oe1 = T.seg[(i + 2) % 3], s_e2o = T.seg[(i + 1) % 3];
            const int n_de2 = U.nb[(j + 2) % 3], n_e1d = U.nb[(j + 1) % 3];
            const bool s_de2 = U.seg[(j + 2) % 3], s_e1d = U.seg[(j + 1) % 3];
            tris_[t] = Tri{{o, e1, d}, {n_e1d, u, n_oe1}, {s_e1d, false, s_oe1}, T.inside};
            tris_[u] = Tri{{d, e2, o}, {n_e2o, t, n_de2}, {s_e2o, false, s_de2}, T.inside};
            replace_neighbor(n_e1d, u, t);
            replace_neighbor(n_e2o, t, u);
            vtri_[o] = t, vtri_[e1] = t, vtri_[d] = t, vtri_[e2] = u;
            stack_.push_back({t, 0});
            stack_.push_back({u, 2});
        }
    }

    /// Triangle holding edge (a, b) and the local index of the opposite vertex.
    std::pair<int, int> find_edge(int a, int b) const {
        const int t0 = vtri_[a];
        int t = t0;
        std::size_t guard = 0;
        do {
            const int ia = index_of(t, a);
            if (ia < 0) throw MeshingError("corrupt vertex-to-triangle map");
            const int next = tris_[t].v[(ia + 1) % 3];
            const int prev = tris_[t].v[(ia + 2) % 3];
            if (next == b) return {t, (ia + 2) % 3};
            if (prev == b) return {t, (ia + 1) % 3};
            t = tris_[t].nb[(ia + 2) % 3];
            if (++guard > 10000) break;
        } while (t >= 0 && t != t0);
        return {-1, -1};
    }

    void mark_segment(int a, int b, int loop) {
        const auto [t, k] = find_edge(a, b);
        tris_[t].seg[k] = true;
        const int u = tris_[t].nb[k];
        if (u >= 0) tris_[u].seg[nb_index(u, t)] = true;
        segments_[key(a, b)] = loop;
    }

    void recover_segments() {
        while (!pending_.empty()) {
            const auto [a, b, loop] = pending_.back();
            pending_.pop_back();
            if (find_edge(a, b).first >= 0) {
                mark_segment(a, b, loop);
                continue;
            }
            const int m = add_vertex((P(a) + P(b)) * 0.5, loop);
            insert(m, vtri_[a]);
            pending_.push_back({a, m, loop});
            pending_.push_back({m, b, loop});
        }
    }

    void classify_regions() {
        std::vector<int> region(tris_.size(), -1);
        int next_region = 0;
        for (int seed = 0; seed < static_cast<int>(tris_.size()); ++seed) {
            if (region[seed] >= 0) continue;
            std::vector<int> members{seed};
            region[seed] = next_region;
            bool touches_super = false;
            for (std::size_t q = 0; q < members.size(); ++q) {
                const Tri& T = tris_[members[q]];
                for (int k = 0; k < 3; ++k) {
                    if (T.v[k] < 3) touches_super = true;
                    const int u = T.nb[k];
                    if (u >= 0 && !T.seg[k] && region[u] < 0) {
                        region[u] = next_region;
                        members.push_back(u);
                    }
                }
            }
            bool inside = false;
            if (!touches_super) {
                int best = members.front();
                double best_area = -1.0;
                for (int t : members) {
                    const Tri& T = tris_[t];
                    const double area = static_cast<double>(orient2d(P(T.v[0]), P(T.v[1]), P(T.v[2])));
                    if (area > best_area) best_area = area, best = t;
                }
                const Tri& T = tris_[best];
                inside = spec_.contains((P(T.v[0]) + P(T.v[1]) + P(T.v[2])) * (1.0 / 3.0));
            }
            for (int t : members) tris_[t].inside = inside;
            ++next_region;
        }
    }

    // --- refinement -------------------------------------------------------------------

    bool is_bad(int t) const {
        const Tri& T = tris_[t];
        if (!T.inside) return false;
        const Vec2 &a = P(T.v[0]), &b = P(T.v[1]), &c = P(T.v[2]);
        const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
        const double lmin = std::min({la, lb, lc}), lmax = std::max({la, lb, lc});
        if (lmax > opt_.size_factor * h_) return true;
        const double area2 = std::abs((b - a).cross(c - a));
        const double circumradius = la * lb * lc / (2.0 * area2);
        return circumradius / lmin > max_ratio_;
    }

    void queue_if_bad(int t) {
        if (is_bad(t)) bad_.push_back({t, tris_[t].v});
    }

    bool segment_encroached(int a, int b) const {
        const auto [t, k] = find_edge(a, b);
        if (t < 0) return false;
        const Tri& T = tris_[t];
        if (T.inside && encroaches(P(T.v[k]), P(a), P(b))) return true;
        const int u = T.nb[k];
        if (u >= 0 && tris_[u].inside) {
            const int j = nb_index(u, t);
            if (encroaches(P(tris_[u].v[j]), P(a), P(b))) return true;
        }
        return false;
    }

    void after_insert(int v) {
        const int t0 = vtri_[v];
        int t = t0;
        do {
            const int iv = index_of(t, v);
            queue_if_bad(t);
            const Tri& T = tris_[t];
            if (T.seg[iv] && T.inside) {
                const int a = T.v[(iv + 1) % 3], b = T.v[(iv + 2) % 3];
                if (encroaches(P(v), P(a), P(b))) encroached_.push_back({a, b, 0});
            }
            t = T.nb[(iv + 2) % 3];
        } while (t >= 0 && t != t0);
    }

    void split_segment(int a, int b) {
        const auto [t, k] = find_edge(a, b);
        const int loop = segments_.at(key(a, b));
        const int m = add_vertex((P(a) + P(b)) * 0.5, loop);
        insert_at(m, t, k);
        encroached_.push_back({a, m, 0});
        encroached_.push_back({m, b, 0});
        after_insert(m);
    }

    /// Follow the ray from the centroid of t towards c. Returns the triangle
    /// containing c, or the first segment crossed.
    struct WalkResult {
        int tri = -1;
        int edge = -1;  ///< on-edge index inside tri, or -1
        int seg_a = -1, seg_b = -1;
    };

    WalkResult walk_to(int t, const Vec2& c) const {
        const Tri& T0 = tris_[t];
        const Vec2 g = (P(T0.v[0]) + P(T0.v[1]) + P(T0.v[2])) * (1.0 / 3.0);
        const std::size_t cap = tris_.size() + 16;
        for (std::size_t step = 0; step < cap; ++step) {
            const Tri& T = tris_[t];
            int exit = -1, any_out = -1, on_edge = -1;
            for (int k = 0; k < 3; ++k) {
                const Vec2 &a = P(T.v[(k + 1) % 3]), &b = P(T.v[(k + 2) % 3]);
                const long double o = orient2d(a, b, c);
                if (o == 0) on_edge = k;
                if (o >= 0) continue;
                any_out = k;
                const long double oa = orient2d(g, c, a), ob = orient2d(g, c, b);
                if (exit < 0 && ((oa >= 0 && ob <= 0) || (oa <= 0 && ob >= 0))) exit = k;
            }
            if (any_out < 0) return {t, on_edge, -1, -1};
            if (exit < 0) exit = any_out;
            if (T.seg[exit] || T.nb[exit] < 0) {
                return {-1, -1, T.v[(exit + 1) % 3], T.v[(exit + 2) % 3]};
            }
            t = T.nb[exit];
        }
        return {-1, -1, -1, -1};
    }

    void process_bad(int t) {
        const Tri& T = tris_[t];
        const Vec2 c = circumcenter(P(T.v[0]), P(T.v[1]), P(T.v[2]));
        const WalkResult w = walk_to(t, c);
        if (w.tri < 0) {
            if (w.seg_a < 0) throw MeshingError(spec_.name + ": circumcenter walk failed");
            encroached_.push_back({w.seg_a, w.seg_b, 1});
            bad_.push_back({t, T.v});
            return;
        }
        // Segments on the boundary of the would-be cavity that c encroaches.
        std::vector<int> cavity{w.tri};
        std::vector<std::array<int, 2>> hit;
        visited_.resize(tris_.size(), 0);
        ++stamp_;
        visited_[w.tri] = stamp_;
        for (std::size_t q = 0; q < cavity.size(); ++q) {
            const Tri& C = tris_[cavity[q]];
            for (int k = 0; k < 3; ++k) {
                const int a = C.v[(k + 1) % 3], b = C.v[(k + 2) % 3];
                if (C.seg[k]) {
                    if (encroaches(c, P(a), P(b))) hit.push_back({a, b});
                    continue;
                }
                const int u = C.nb[k];
                if (u < 0 || visited_[u] == stamp_) continue;
                const Tri& U = tris_[u];
                if (incircle(P(U.v[0]), P(U.v[1]), P(U.v[2]), c) > 0) {
                    visited_[u] = stamp_;
                    cavity.push_back(u);
                }
            }
        }
        if (!hit.empty()) {
            for (const auto& s : hit) encroached_.push_back({s[0], s[1], 1});
            bad_.push_back({t, T.v});
            return;
        }
        const int v = add_vertex(c, -1);
        insert_at(v, w.tri, w.edge);
        after_insert(v);
    }

    void refine() {
        for (const auto& [k, loop] : segments_) {
            const int a = static_cast<int>(k >> 32), b = static_cast<int>(k & 0xffffffffu);
            if (segment_encroached(a, b)) encroached_.push_back({a, b, 0});
        }
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t) queue_if_bad(t);
        while (true) {
            if (!encroached_.empty()) {
                const auto [a, b, forced] = encroached_.front();
                encroached_.pop_front();
                if (segments_.count(key(a, b)) && (forced || segment_encroached(a, b))) split_segment(a, b);
                continue;
            }
            if (!bad_.empty()) {
                const TriKey tk = bad_.front();
                bad_.pop_front();
                if (tris_[tk.t].v != tk.v || !is_bad(tk.t)) continue;
                process_bad(tk.t);
                continue;
            }
            // Final sweep in case a stale key hid a poor triangle.
            for (int t = 0; t < static_cast<int>(tris_.size()); ++t) queue_if_bad(t);
            if (bad_.empty()) break;
        }
    }

    Mesh extract() const {
        Mesh mesh;
        mesh.h = h_;
        mesh.hole_count = static_cast<int>(spec_.hole_count());
        std::vector<int> remap(pts_.size(), -1);
        std::vector<char> used(pts_.size(), 0);
        for (const Tri& T : tris_) {
            if (T.inside) {
                for (int v : T.v) used[v] = 1;
            }
        }
        for (std::size_t v = 0; v < pts_.size(); ++v) {
            if (used[v]) {
                remap[v] = static_cast<int>(mesh.nodes.size());
                mesh.nodes.push_back(pts_[v]);
            }
        }
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            const Tri& T = tris_[t];
            if (!T.inside) continue;
            mesh.triangles.push_back({remap[T.v[0]], remap[T.v[1]], remap[T.v[2]]});
            for (int k = 0; k < 3; ++k) {
                if (!T.seg[k]) continue;
                const int u = T.nb[k];
                if (u >= 0 && tris_[u].inside) continue;
                const int a = T.v[(k + 1) % 3], b = T.v[(k + 2) % 3];
                mesh.boundary_edges.push_back({remap[a], remap[b], segments_.at(key(a, b))});
            }
        }
        std::sort(mesh.boundary_edges.begin(), mesh.boundary_edges.end(),
                  [](const BoundaryEdge& x, const BoundaryEdge& y) {
                      return std::tie(x.loop, x.a, x.b) < std::tie(y.loop, y.a, y.b);
                  });
        return mesh;
    }

    struct PendingSegment {
        int a, b, loop;
    };

    const DomainSpec& spec_;
    double h_;
    MeshOptions opt_;
    double max_ratio_;
    std::vector<Vec2> pts_;
    std::vector<int> vloop_;
    std::vector<int> vtri_;
    std::vector<Tri> tris_;
    std::unordered_map<std::uint64_t, int> segments_;
    std::vector<PendingSegment> pending_;
    std::vector<std::pair<int, int>> stack_;
    std::deque<std::array<int, 3>> encroached_;  ///< (a, b, forced)
    std::deque<TriKey> bad_;
    std::vector<int> visited_;
    int stamp_ = 0;
};

}  // namespace detail

/**
 * Quality triangulation of the region between the outer loop and the holes.
 * Each loop gets at least opt.min_loop_edges edges, so small holes are
 * resolved by local grading regardless of h.
 */
inline Mesh triangulate(const DomainSpec& spec, double h, const MeshOptions& opt = {}) {
    if (!(h > 0)) throw MeshingError("mesh size h must be positive");
    Mesh mesh = detail::DelaunayRefiner(spec, h, opt).run();
    mesh.check();
    return mesh;
}

/**
 * Mesh a half-domain whose outer loop contains a cut on x2 = 0 and reflect it
 * across that axis. Hole i of the half-domain keeps tag i; its mirror image
 * gets tag mirrored_tags[i - 1]. The result is exactly symmetric.
 */
inline Mesh triangulate_mirrored(const DomainSpec& half, double h, std::span<const int> mirrored_tags,
                                 const MeshOptions& opt = {}) {
    if (!half.outer.has_cut()) throw MeshingError(half.name + ": half-domain has no symmetry cut");
    if (mirrored_tags.size() != half.hole_count()) throw MeshingError("one mirrored tag per hole is required");
    const Mesh upper = triangulate(half, h, opt);
    Mesh full;
    full.h = h;
    full.hole_count = static_cast<int>(2 * half.hole_count());
    full.nodes = upper.nodes;
    std::vector<int> image(upper.nodes.size());
    for (std::size_t v = 0; v < upper.nodes.size(); ++v) {
        if (upper.nodes[v].y == 0.0) {
            image[v] = static_cast<int>(v);
        } else {
            image[v] = static_cast<int>(full.nodes.size());
            full.nodes.push_back({upper.nodes[v].x, -upper.nodes[v].y});
        }
    }
    full.triangles = upper.triangles;
    for (const auto& t : upper.triangles) full.triangles.push_back({image[t[0]], image[t[2]], image[t[1]]});
    for (const auto& e : upper.boundary_edges) {
        if (detail::DelaunayRefiner::on_cut(upper, e)) continue;
        full.boundary_edges.push_back(e);
        const int tag = e.loop == 0 ? 0 : mirrored_tags[e.loop - 1];
        full.boundary_edges.push_back({image[e.b], image[e.a], tag});
    }
    std::sort(full.boundary_edges.begin(), full.boundary_edges.end(),
              [](const BoundaryEdge& x, const BoundaryEdge& y) {
                  return std::tie(x.loop, x.a, x.b) < std::tie(y.loop, y.a, y.b);
              });
    full.check();
    return full;
}

/// Symmetric mesh of the stadium: the upper half is meshed and reflected.
inline Mesh triangulate_stadium_symmetric(double delta, double h, const MeshOptions& opt = {}) {
    const std::array<int, 1> tags{2};
    return triangulate_mirrored(preset::stadium_upper_half(delta), h, tags, opt);
}

/**
 * Red refinement: every triangle split into four. Midpoints of boundary edges
 * are moved onto the analytic loop of `spec`.
 */
inline Mesh refine_uniform(const Mesh& mesh, const DomainSpec& spec) {
    Mesh out;
    out.h = mesh.h / 2;
    out.hole_count = mesh.hole_count;
    out.nodes = mesh.nodes;
    std::map<std::pair<int, int>, int> mid;
    std::map<std::pair<int, int>, int> boundary_loop;
    for (const auto& e : mesh.boundary_edges) boundary_loop[{std::min(e.a, e.b), std::max(e.a, e.b)}] = e.loop;
    auto midpoint = [&](int a, int b) {
        const std::pair<int, int> k{std::min(a, b), std::max(a, b)};
        auto it = mid.find(k);
        if (it != mid.end()) return it->second;
        Vec2 p = (mesh.nodes[a] + mesh.nodes[b]) * 0.5;
        auto bl = boundary_loop.find(k);
        if (bl != boundary_loop.end()) {
            const Loop& curve = spec.loop(bl->second);
            p = curve.point(curve.project(p));
        }
        const int id = static_cast<int>(out.nodes.size());
        out.nodes.push_back(p);
        mid.emplace(k, id);
        return id;
    };
    for (const auto& t : mesh.triangles) {
        const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
        out.triangles.push_back({t[0], ab, ca});
        out.triangles.push_back({ab, t[1], bc});
        out.triangles.push_back({ca, bc, t[2]});
        out.triangles.push_back({ab, bc, ca});
    }
    for (const auto& e : mesh.boundary_edges) {
        const int m = mid.at({std::min(e.a, e.b), std::max(e.a, e.b)});
        out.boundary_edges.push_back({e.a, m, e.loop});
        out.boundary_edges.push_back({m, e.b, e.loop});
    }
    out.check();
    return out;
}

}  // namespace lineorient
