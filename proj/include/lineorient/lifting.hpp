/**
 * @file lifting.hpp
 * @brief Lifting planar line fields to director fields along sampled paths and
 *        over meshes. A failed mesh lift returns a cycle of nodes around which
 *        sign propagation is inconsistent.
 */
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "lineorient/errors.hpp"
#include "lineorient/geometry.hpp"
#include "lineorient/tensor.hpp"

namespace lineorient {

/// Largest admissible |Q_{k+1} - Q_k|: 0.99 * sqrt(2) |s|. At sqrt(2)|s| the two
/// directors are orthogonal and the sign choice degenerates.
inline double lift_step_bound(double s) { return 0.99 * std::numbers::sqrt2 * std::abs(s); }

struct PathSamples {
    std::vector<QTensor2> q;
    double s = 1.0;

    double max_step() const {
        double m = 0.0;
        for (std::size_t k = 0; k + 1 < q.size(); ++k) m = std::max(m, frobenius_distance(q[k], q[k + 1]));
        return m;
    }
};

struct LiftResult {
    std::vector<Director2> n;
    double max_step = 0.0;
    double margin = 0.0;  ///< bound minus max_step
};

inline LiftResult lift_path(const PathSamples& samples, const Director2& initial) {
    if (samples.q.empty()) throw DomainError("empty path");
    const OrderParameter s(samples.s);
    const double bound = lift_step_bound(s);
    if (frobenius_distance(project(initial, s), samples.q.front()) > 1e-6) {
        throw InitialMismatch("initial director does not orient the first sample");
    }
    LiftResult out;
    out.n.reserve(samples.q.size());
    out.n.push_back(initial);
    for (std::size_t k = 0; k + 1 < samples.q.size(); ++k) {
        const double step = frobenius_distance(samples.q[k], samples.q[k + 1]);
        if (step >= bound) throw StepTooLarge(k, step, bound);
        out.max_step = std::max(out.max_step, step);
        Director2 next = director(samples.q[k + 1]);
        if (next.dot(out.n.back()) < 0) next = -next;
        out.n.push_back(next);
    }
    out.margin = bound - out.max_step;
    return out;
}

/// Lift around a closed loop (the last sample connects back to the first) and
/// report whether the director returns to itself.
inline bool closed_lift_returns(const PathSamples& loop) {
    PathSamples closed = loop;
    closed.q.push_back(loop.q.front());
    const LiftResult r = lift_path(closed, director(loop.q.front()));
    return r.n.front().dot(r.n.back()) > 0;
}

struct FieldLift {
    bool orientable = false;
    std::vector<Director2> n;   ///< nodal directors when orientable
    std::vector<int> witness;   ///< node cycle (closing edge back to the first node implied)
    double max_edge_step = 0.0;
};

/// Sign relation of an edge: +1 if the canonical directors at its ends agree.
inline int edge_sign(const QTensor2& a, const QTensor2& b) { return director(a).dot(director(b)) > 0 ? 1 : -1; }

/// Breadth-first sign propagation from the lowest-index node of each component.
inline FieldLift lift_field(const Mesh& mesh, std::span<const QTensor2> q) {
    if (mesh.nodes.empty()) throw DomainError("empty mesh");
    if (q.size() != mesh.nodes.size()) throw DomainError("field size does not match the mesh");
    const double bound = lift_step_bound(q.front().s);
    const std::size_t nn = mesh.nodes.size();
    std::vector<std::vector<int>> adj(nn);
    FieldLift out;
    for (const auto& [u, v] : mesh.edges()) {
        const double step = frobenius_distance(q[u], q[v]);
        if (step >= bound) throw EdgeStepTooLarge(u, v, step, bound);
        out.max_edge_step = std::max(out.max_edge_step, step);
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<Director2> n(nn);
    std::vector<int> parent(nn, -2);
    std::vector<int> depth(nn, 0);
    for (std::size_t root = 0; root < nn; ++root) {
        if (parent[root] != -2) continue;
        parent[root] = -1;
        n[root] = director(q[root]);
        std::queue<int> bfs;
        bfs.push(static_cast<int>(root));
        while (!bfs.empty()) {
            const int u = bfs.front();
            bfs.pop();
            for (int w : adj[u]) {
                Director2 cand = director(q[w]);
                if (cand.dot(n[u]) < 0) cand = -cand;
                if (parent[w] == -2) {
                    parent[w] = u;
                    depth[w] = depth[u] + 1;
                    n[w] = cand;
                    bfs.push(w);
                } else if (n[w].dot(cand) < 0) {
                    // Tree path u -> lca, then lca -> w; the edge (w, u) closes the cycle.
                    std::vector<int> up{u}, down{w};
                    int a = u, b = w;
                    while (a != b) {
                        if (depth[a] >= depth[b]) {
                            a = parent[a];
                            up.push_back(a);
                        } else {
                            b = parent[b];
                            down.push_back(b);
                        }
                    }
                    down.pop_back();
                    out.witness = up;
                    out.witness.insert(out.witness.end(), down.rbegin(), down.rend());
                    return out;
                }
            }
        }
    }
    out.orientable = true;
    out.n = std::move(n);
    return out;
}

/// Product of edge sign relations around a node cycle.
inline int cycle_sign(std::span<const int> cycle, std::span<const QTensor2> q) {
    int sign = 1;
    for (std::size_t k = 0; k < cycle.size(); ++k) sign *= edge_sign(q[cycle[k]], q[cycle[(k + 1) % cycle.size()]]);
    return sign;
}

/// Named line fields from the analysis of non-orientable examples.
struct CanonicalField {
    DomainSpec domain;
    std::function<Director2(const Vec2&)> director;
    int min_arc_segments = 0;
};

inline CanonicalField canonical_field(const std::string& name) {
    if (name == "horseshoe") {
        // Vertical in the lower square, tangent to circles about the origin above it.
        return {preset::horseshoe(),
                [](const Vec2& p) {
                    if (p.y < 0) return Director2{0.0, 1.0};
                    return Director2::normalized(-p.y, p.x);
                },
                64};
    }
    if (name == "half_index") {
        return {preset::square(1.0),
                [](const Vec2& p) {
                    if (p.x >= 0) {
                        if (p.x == 0 && p.y == 0) return Director2{0.0, 1.0};
                        return Director2::normalized(p.y, -p.x);
                    }
                    return Director2{0.0, 1.0};
                },
                0};
    }
    if (name == "tangential_outer") {
        return {preset::annulus(0.5, 1.0), [](const Vec2& p) { return Director2::normalized(-p.y, p.x); }, 0};
    }
    throw ConfigError("unknown canonical field '" + name + "'");
}

inline std::vector<QTensor2> sample_field(const Mesh& mesh, const std::function<Director2(const Vec2&)>& director,
                                          double s) {
    const OrderParameter sp(s);
    std::vector<QTensor2> q;
    q.reserve(mesh.nodes.size());
    for (const Vec2& p : mesh.nodes) q.push_back(project(director(p), sp));
    return q;
}

}  // namespace lineorient
