/**
 * @file harmonic.hpp
 * @brief P1 finite elements for the mixed Laplace problems behind the
 *        orientability criterion: hole potentials h_i, the boundary-driven
 *        potential h(g), the Gram matrix D and the flux vector J(g).
 *
 * Dirichlet loops are eliminated from the system; every other loop carries a
 * natural (Neumann) condition. The reduced system is solved with Jacobi
 * preconditioned conjugate gradients.
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "lineorient/degree.hpp"
#include "lineorient/errors.hpp"
#include "lineorient/geometry.hpp"
#include "lineorient/tensor.hpp"

namespace lineorient {

/// Boundary line field g on the outer loop, sampled at the outer mesh nodes.
struct BoundaryData {
    static constexpr int kSub = 8;  ///< sub-intervals per edge for the boundary-integral flux

    double s = 1.0;
    std::vector<int> nodes;  ///< outer nodes in traversal order (material on the left)
    std::vector<double> t;   ///< curve parameter of each node
    std::vector<QTensor2> g;
    std::vector<AuxValue> a;                     ///< A(g) at each node
    std::vector<double> dalpha;                  ///< increment of arg A(g) along edge k -> k+1
    std::vector<std::array<double, kSub>> sub_dalpha;  ///< the same increment resolved on sub-intervals
    int degree = 0;                              ///< winding number of A(g) along the outer loop

    double angle_at(std::size_t k) const { return a[k].angle(); }
};

namespace detail {
inline double wrap_increment(const AuxValue& from, const AuxValue& to, std::size_t index) {
    const double inc = relative_angle(from, to);
    if (std::abs(inc) >= kMaxGap) throw GapTooLarge(index, std::abs(inc));
    return inc;
}
}  // namespace detail

/// Boundary data from A(g) as a function of the outer-curve parameter t in [0, 1).
inline BoundaryData make_boundary_data(const DomainSpec& spec, const Mesh& mesh, double s,
                                       const std::function<AuxValue(double)>& aux_of_t) {
    const OrderParameter sp(s);
    BoundaryData bd;
    bd.s = s;
    bd.nodes = mesh.loop_nodes(0);
    const std::size_t m = bd.nodes.size();
    if (m < 3) throw DataError("outer boundary has fewer than three nodes");
    for (int v : bd.nodes) {
        const double t = spec.outer.project(mesh.nodes[v]);
        bd.t.push_back(t);
        const AuxValue a = aux_of_t(t);
        bd.a.push_back(a);
        bd.g.push_back(aux_inverse(a, sp));
    }
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t k1 = (k + 1) % m;
        bd.dalpha.push_back(detail::wrap_increment(bd.a[k], bd.a[k1], k));
        double ta = bd.t[k], tb = bd.t[k1];
        if (tb <= ta) tb += 1.0;
        std::array<double, BoundaryData::kSub> sub{};
        AuxValue prev = bd.a[k];
        for (int j = 1; j <= BoundaryData::kSub; ++j) {
            const AuxValue cur = j == BoundaryData::kSub ? bd.a[k1] : aux_of_t(ta + (tb - ta) * j / BoundaryData::kSub);
            sub[j - 1] = detail::wrap_increment(prev, cur, k);
            prev = cur;
        }
        bd.sub_dalpha.push_back(sub);
    }
    bd.degree = winding_number(std::span<const AuxValue>(bd.a));
    return bd;
}

/// g = s (t (x) t - Id/3) with t the unit tangent of the outer curve.
inline BoundaryData tangential_boundary_data(const DomainSpec& spec, const Mesh& mesh, double s) {
    return make_boundary_data(spec, mesh, s, [&](double t) {
        const Vec2 tau = spec.outer.tangent(t);
        return AuxValue::from_angle(2.0 * std::atan2(tau.y, tau.x));
    });
}

inline BoundaryData constant_boundary_data(const DomainSpec& spec, const Mesh& mesh, double s, const Director2& n) {
    const AuxValue a = AuxValue::from_angle(2.0 * n.angle());
    return make_boundary_data(spec, mesh, s, [a](double) { return a; });
}

/// Samples (t, q11, q12), linearly interpolated in t with period 1.
struct BoundaryTable {
    std::vector<double> t, q11, q12;
};

inline BoundaryTable parse_boundary_csv(const std::string& text) {
    BoundaryTable table;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen && std::isalpha(static_cast<unsigned char>(line[0]))) {
            header_seen = true;
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double t, a, b;
        if (!(ss >> t >> a >> b)) throw DataError("boundary data rows must be 't,q11,q12': '" + line + "'");
        if (t < 0 || t >= 1) throw DataError("boundary data parameter t must lie in [0,1)");
        table.t.push_back(t), table.q11.push_back(a), table.q12.push_back(b);
    }
    if (table.t.size() < 2) throw DataError("boundary data needs at least two rows");
    if (!std::is_sorted(table.t.begin(), table.t.end())) throw DataError("boundary data must be sorted by t");
    return table;
}

inline BoundaryData tabulated_boundary_data(const DomainSpec& spec, const Mesh& mesh, double s,
                                            const BoundaryTable& table) {
    return make_boundary_data(spec, mesh, s, [&](double t) {
        t -= std::floor(t);
        const std::size_t m = table.t.size();
        auto it = std::upper_bound(table.t.begin(), table.t.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - table.t.begin()) % m;
        const std::size_t lo = (hi + m - 1) % m;
        double t0 = table.t[lo], t1 = table.t[hi];
        double tt = t;
        if (t1 <= t0) t1 += 1.0;
        if (tt < t0) tt += 1.0;
        const double w = (tt - t0) / (t1 - t0);
        const QTensor2 q{(1 - w) * table.q11[lo] + w * table.q11[hi], (1 - w) * table.q12[lo] + w * table.q12[hi], s};
        const AuxValue a = aux(q);
        const double r = a.modulus();
        if (r < 1e-9) throw DataError("interpolated boundary data degenerates near t = " + std::to_string(t));
        return AuxValue{a.re / r, a.im / r};
    });
}

/// Nodal solution with the loops that carried Dirichlet values.
struct HarmonicField {
    Eigen::VectorXd u;
    std::vector<int> dirichlet_loops;
};

struct SolverSettings {
    double tolerance = 1e-10;
    double cap_factor = 50.0;  ///< iteration cap = cap_factor * sqrt(#unknowns)
};

/**
 * P1 stiffness for one mesh with a fixed set of Dirichlet loops. The reduced
 * operator and its preconditioner are set up once and reused for every right-hand side. The mesh
 * must outlive the system.
 */
class LaplaceSystem {
public:
    using SpMat = Eigen::SparseMatrix<double>;

    LaplaceSystem(const Mesh& mesh, std::vector<int> dirichlet_loops, SolverSettings settings = {})
        : mesh_(&mesh), dirichlet_loops_(std::move(dirichlet_loops)), settings_(settings) {
        const int nn = static_cast<int>(mesh.nodes.size());
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(mesh.triangles.size() * 9);
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto& tri = mesh.triangles[t];
            const double area = mesh.triangle_area(t);
            std::array<Vec2, 3> e;
            for (int i = 0; i < 3; ++i) e[i] = mesh.nodes[tri[(i + 2) % 3]] - mesh.nodes[tri[(i + 1) % 3]];
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) trip.emplace_back(tri[i], tri[j], e[i].dot(e[j]) / (4.0 * area));
            }
        }
        K_.resize(nn, nn);
        K_.setFromTriplets(trip.begin(), trip.end());

        node_loop_ = mesh.node_loops();
        free_index_.assign(nn, -1);
        for (int v = 0; v < nn; ++v) {
            if (!is_dirichlet(v)) {
                free_index_[v] = static_cast<int>(free_nodes_.size());
                free_nodes_.push_back(v);
            }
        }
        if (free_nodes_.size() == static_cast<std::size_t>(nn)) {
            throw DomainError("Laplace system needs at least one Dirichlet loop");
        }
        const int nf = static_cast<int>(free_nodes_.size());
        std::vector<Eigen::Triplet<double>> ff, fd;
        for (int k = 0; k < K_.outerSize(); ++k) {
            for (SpMat::InnerIterator it(K_, k); it; ++it) {
                const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
                if (free_index_[r] < 0) continue;
                if (free_index_[c] >= 0) {
                    ff.emplace_back(free_index_[r], free_index_[c], it.value());
                } else {
                    fd.emplace_back(free_index_[r], c, it.value());
                }
            }
        }
        auto kff = std::make_shared<SpMat>(nf, nf);
        kff->setFromTriplets(ff.begin(), ff.end());
        Kff_ = kff;
        Kfd_.resize(nf, nn);
        Kfd_.setFromTriplets(fd.begin(), fd.end());
        // The solver keeps a reference to the matrix; both live on the heap so
        // the system stays valid when moved.
        auto cg = std::make_shared<Solver>();
        cg->setTolerance(settings_.tolerance);
        cg->setMaxIterations(std::max(10, static_cast<int>(settings_.cap_factor * std::sqrt(static_cast<double>(nf)))));
        cg->compute(*Kff_);
        cg_ = cg;
    }

    /// Dirichlet on every hole, natural condition on the outer loop.
    static LaplaceSystem holes_dirichlet(const Mesh& mesh, SolverSettings settings = {}) {
        std::vector<int> loops;
        for (int i = 1; i <= mesh.hole_count; ++i) loops.push_back(i);
        return LaplaceSystem(mesh, loops, settings);
    }

    const Mesh& mesh() const { return *mesh_; }
    const SpMat& stiffness() const { return K_; }
    const std::vector<int>& dirichlet_loops() const { return dirichlet_loops_; }
    const std::vector<int>& node_loop() const { return node_loop_; }
    bool is_dirichlet(int v) const {
        return node_loop_[v] >= 0 &&
               std::find(dirichlet_loops_.begin(), dirichlet_loops_.end(), node_loop_[v]) != dirichlet_loops_.end();
    }
    std::size_t unknowns() const { return free_nodes_.size(); }

    /// Solve K u = load on free nodes with u = dirichlet on Dirichlet nodes.
    /// Both arguments are full nodal vectors.
    HarmonicField solve(const Eigen::VectorXd& dirichlet, const Eigen::VectorXd& load) const {
        const Eigen::Index nn = static_cast<Eigen::Index>(mesh_->nodes.size());
        if (dirichlet.size() != nn || load.size() != nn) throw DomainError("nodal vector size mismatch");
        Eigen::VectorXd ud = Eigen::VectorXd::Zero(nn);
        for (Eigen::Index v = 0; v < nn; ++v) {
            if (free_index_[v] < 0) ud[v] = dirichlet[v];
        }
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(free_nodes_.size()));
        for (std::size_t k = 0; k < free_nodes_.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = load[free_nodes_[k]];
        rhs -= Kfd_ * ud;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
        if (rhs.norm() > 0) {
            x = cg_->solve(rhs);
            if (cg_->info() != Eigen::Success || !(cg_->error() <= settings_.tolerance)) {
                throw NumericalFailure("conjugate gradients stopped after " + std::to_string(cg_->iterations()) +
                                       " iterations with relative residual " + std::to_string(cg_->error()));
            }
        }
        HarmonicField f;
        f.u = ud;
        for (std::size_t k = 0; k < free_nodes_.size(); ++k) f.u[free_nodes_[k]] = x[static_cast<Eigen::Index>(k)];
        f.dirichlet_loops = dirichlet_loops_;
        return f;
    }

    /// Dirichlet integral of a nodal P1 function.
    double energy(const Eigen::VectorXd& u) const { return u.dot(K_ * u); }

    /// Discrete conormal flux through a loop: sum of (K u - load) over its nodes.
    double loop_flux(const Eigen::VectorXd& u, const Eigen::VectorXd& load, int loop) const {
        const Eigen::VectorXd r = K_ * u - load;
        double total = 0.0;
        for (std::size_t v = 0; v < node_loop_.size(); ++v) {
            if (node_loop_[v] == loop) total += r[static_cast<Eigen::Index>(v)];
        }
        return total;
    }

private:
    const Mesh* mesh_;
    std::vector<int> dirichlet_loops_;
    SolverSettings settings_;
    using Solver = Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>>;
    SpMat K_, Kfd_;
    std::shared_ptr<const SpMat> Kff_;
    std::shared_ptr<Solver> cg_;
    std::vector<int> node_loop_;
    std::vector<int> free_index_;
    std::vector<int> free_nodes_;
};

/// h_i: 1 on hole i, 0 on the other holes, zero Neumann on the outer loop.
inline HarmonicField solve_hi(const LaplaceSystem& sys, int i) {
    const Mesh& mesh = sys.mesh();
    if (i < 1 || i > mesh.hole_count) throw DomainError("hole index " + std::to_string(i) + " out of range");
    const Eigen::Index nn = static_cast<Eigen::Index>(mesh.nodes.size());
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(nn);
    for (Eigen::Index v = 0; v < nn; ++v) {
        if (sys.node_loop()[v] == i) dir[v] = 1.0;
    }
    return sys.solve(dir, Eigen::VectorXd::Zero(nn));
}

/// Outer-boundary load of the Neumann density A(g) x dA(g)/dtau: each edge's
/// increment of arg A(g) is split equally between its end nodes.
inline Eigen::VectorXd neumann_load(const Mesh& mesh, const BoundaryData& bd) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.nodes.size()));
    const std::size_t m = bd.nodes.size();
    for (std::size_t k = 0; k < m; ++k) {
        f[bd.nodes[k]] += 0.5 * bd.dalpha[k];
        f[bd.nodes[(k + 1) % m]] += 0.5 * bd.dalpha[k];
    }
    return f;
}

/// h(g): zero on every hole, Neumann density A(g) x dA(g)/dtau on the outer loop.
inline HarmonicField solve_hg(const LaplaceSystem& sys, const BoundaryData& bd) {
    const Eigen::Index nn = static_cast<Eigen::Index>(sys.mesh().nodes.size());
    return sys.solve(Eigen::VectorXd::Zero(nn), neumann_load(sys.mesh(), bd));
}

/// D_ij = (1/2 pi) int grad h_i . grad h_j.
inline Eigen::MatrixXd assemble_D(const LaplaceSystem& sys, const std::vector<HarmonicField>& hi) {
    const int n = static_cast<int>(hi.size());
    Eigen::MatrixXd U(sys.mesh().nodes.size(), n);
    for (int i = 0; i < n; ++i) U.col(i) = hi[i].u;
    Eigen::MatrixXd D = U.transpose() * (sys.stiffness() * U) / (2.0 * std::numbers::pi);
    return 0.5 * (D + D.transpose());
}

struct FluxResult {
    Eigen::VectorXd J;        ///< conormal (residual) extraction at the holes
    Eigen::VectorXd J_cross;  ///< boundary integral over the outer loop
    double error = 0.0;       ///< max |J - J_cross|
};

struct FluxOptions {
    /// Expected agreement between the two extractions; disagreement beyond 10x
    /// this value is treated as inconsistent data.
    double tolerance = 0.01;
};

/**
 * J^i = (1/2 pi) times the flux of h(g) through hole i (normal pointing out of
 * the material). Primary value: the discrete conormal residual summed over the
 * hole nodes. Cross-check: J^i = -(1/2 pi) int_outer (A x A_tau) h_i, evaluated
 * on sub-intervals of each outer edge.
 */
inline FluxResult compute_J(const LaplaceSystem& sys, const HarmonicField& hg, const BoundaryData& bd,
                            const std::vector<HarmonicField>& hi, FluxOptions opt = {}) {
    const int n = static_cast<int>(hi.size());
    const double two_pi = 2.0 * std::numbers::pi;
    const Eigen::VectorXd load = neumann_load(sys.mesh(), bd);
    const Eigen::VectorXd r = sys.stiffness() * hg.u - load;
    FluxResult out;
    out.J = Eigen::VectorXd::Zero(n);
    out.J_cross = Eigen::VectorXd::Zero(n);
    const auto& loops = sys.node_loop();
    for (std::size_t v = 0; v < loops.size(); ++v) {
        if (loops[v] >= 1 && loops[v] <= n) out.J[loops[v] - 1] += r[static_cast<Eigen::Index>(v)] / two_pi;
    }
    const std::size_t m = bd.nodes.size();
    for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double ha = hi[i].u[bd.nodes[k]], hb = hi[i].u[bd.nodes[(k + 1) % m]];
            for (int j = 0; j < BoundaryData::kSub; ++j) {
                const double w = (j + 0.5) / BoundaryData::kSub;
                total += bd.sub_dalpha[k][j] * ((1 - w) * ha + w * hb);
            }
        }
        out.J_cross[i] = -total / two_pi;
    }
    out.error = n > 0 ? (out.J - out.J_cross).cwiseAbs().maxCoeff() : 0.0;
    if (out.error > 10.0 * opt.tolerance) {
        throw DataError("flux extraction methods disagree by " + std::to_string(out.error));
    }
    return out;
}

inline double field_energy(const LaplaceSystem& sys, const HarmonicField& f) { return sys.energy(f.u); }

inline std::string field_csv(const Mesh& mesh, const Eigen::VectorXd& u) {
    std::ostringstream out;
    out.precision(17);
    out << "node_index,x,y,value\n";
    for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
        out << v + 1 << ',' << mesh.nodes[v].x << ',' << mesh.nodes[v].y << ',' << u[static_cast<Eigen::Index>(v)]
            << "\n";
    }
    return out.str();
}

}  // namespace lineorient
