/**
 * @file criterion.hpp
 * @brief The integer quadratic program over hole degree classes that decides
 *        whether global minimizers of the line-field Dirichlet energy are
 *        orientable, and reconstruction of the minimizing field.
 *
 * For a degree class d (integer vector with sum -deg A(g)) the minimal energy
 * is (s^2/2)(2 pi q(d) + int |grad h(g)|^2) with q(d) = (d - J).D^+(d - J).
 * A class is orientable iff every entry is even.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lineorient/degree.hpp"
#include "lineorient/errors.hpp"
#include "lineorient/harmonic.hpp"
#include "lineorient/tensor.hpp"

namespace lineorient {

enum class Verdict { AllMinimizersNonOrientable, AllMinimizersOrientable, BothKindsExist, NumericallyIndeterminate };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::AllMinimizersNonOrientable: return "AllMinimizersNonOrientable";
        case Verdict::AllMinimizersOrientable: return "AllMinimizersOrientable";
        case Verdict::BothKindsExist: return "BothKindsExist";
        case Verdict::NumericallyIndeterminate: return "NumericallyIndeterminate";
    }
    return "?";
}

using DegreeClass = Eigen::VectorXi;

inline bool is_even_class(const DegreeClass& d) {
    return std::all_of(d.data(), d.data() + d.size(), [](int x) { return x % 2 == 0; });
}

/**
 * q(d) = (d - J).D^+(d - J) on the hyperplane sum(d) = -outer_deg. D is
 * projected onto e-perp, and J is shifted by a multiple of e so that
 * sum(J) = -outer_deg exactly.
 */
class QuadraticForm {
public:
    QuadraticForm(const Eigen::MatrixXd& D, const Eigen::VectorXd& J, int outer_deg) : outer_deg_(outer_deg) {
        const Eigen::Index n = D.rows();
        if (D.cols() != n || J.size() != n) throw DomainError("D and J sizes disagree");
        if (n == 0) return;
        const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
        D_ = P * (0.5 * (D + D.transpose())) * P;
        J_raw_ = J;
        J_ = J - Eigen::VectorXd::Constant(n, (J.sum() + outer_deg) / n);
        const Eigen::MatrixXd E = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(D_ + E);
        if (ldlt.info() != Eigen::Success) throw NumericalFailure("factorization of D failed");
        Dplus_ = ldlt.solve(Eigen::MatrixXd::Identity(n, n)) - E;
        Dplus_ = 0.5 * (Dplus_ + Dplus_.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(D_);
        lambda_max_ = eig.eigenvalues().maxCoeff();
        if (n > 1 && !(eig.eigenvalues()(1) > 1e-12 * std::max(1.0, lambda_max_))) {
            throw DomainError("D has a nullspace larger than span(e); holes are not separated");
        }
    }

    int size() const { return static_cast<int>(J_.size()); }
    int outer_degree() const { return outer_deg_; }
    const Eigen::MatrixXd& D() const { return D_; }
    const Eigen::MatrixXd& pseudo_inverse() const { return Dplus_; }
    const Eigen::VectorXd& J() const { return J_; }
    const Eigen::VectorXd& J_raw() const { return J_raw_; }
    double lambda_max() const { return lambda_max_; }

    /// Gauge-fixed (c.e = 0) solution of D c = d - J.
    Eigen::VectorXd solve_c(const DegreeClass& d) const {
        check_class(d);
        const Eigen::VectorXd rhs = d.cast<double>() - J_;
        const Eigen::VectorXd c = Dplus_ * rhs;
        const double residual = (D_ * c - rhs).norm();
        if (residual > 1e-8 * std::max(1.0, rhs.norm())) {
            throw DataError("D c = d - J has residual " + std::to_string(residual));
        }
        return c;
    }

    double value(const DegreeClass& d) const {
        check_class(d);
        const Eigen::VectorXd r = d.cast<double>() - J_;
        return r.dot(Dplus_ * r);
    }

    /// c.D.c for an arbitrary representative c (gauge shifts along e allowed).
    double value_of_c(const Eigen::VectorXd& c) const { return c.dot(D_ * c); }

private:
    void check_class(const DegreeClass& d) const {
        if (d.size() != J_.size()) throw DomainError("degree class has the wrong length");
        if (d.sum() != -outer_deg_) {
            throw DataError("degree class sums to " + std::to_string(d.sum()) + ", expected " +
                            std::to_string(-outer_deg_));
        }
    }

    int outer_deg_ = 0;
    Eigen::MatrixXd D_, Dplus_;
    Eigen::VectorXd J_, J_raw_;
    double lambda_max_ = 0.0;
};

struct EvaluatedClass {
    DegreeClass d;
    double q = 0.0;
    bool even = false;
};

struct CriterionOptions {
    /// Tie tolerance in units of J. Unset: derived from the flux error estimate
    /// and ties are reported as NumericallyIndeterminate.
    std::optional<double> tie_tol;
    double flux_error = 0.0;  ///< used for the default tie tolerance (3x)
    std::size_t max_box = 10'000'000;
    int max_holes = 12;
};

struct CriterionReport {
    int n = 0;
    int outer_degree = 0;
    Eigen::MatrixXd D;
    Eigen::VectorXd J;      ///< projected onto sum(J) = -outer_degree
    Eigen::VectorXd J_raw;
    std::vector<EvaluatedClass> classes;  ///< sorted by q, then lexicographically
    std::optional<EvaluatedClass> best;
    std::optional<EvaluatedClass> best_even;
    std::optional<EvaluatedClass> best_odd;
    Verdict verdict = Verdict::AllMinimizersOrientable;
    double tie_tol = 0.0;         ///< in units of J
    double tie_tol_q = 0.0;       ///< converted to units of q
    double tie_margin = 0.0;      ///< q(best_odd) - q(best_even)
    bool tie_tol_user = false;
    double radius = 0.0;          ///< certified enumeration radius
    bool outside_hypothesis = false;  ///< outer degree odd: g itself is not orientable
    bool simply_connected = false;
};

namespace detail {

inline bool lex_less(const DegreeClass& a, const DegreeClass& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

inline bool better(const EvaluatedClass& a, const std::optional<EvaluatedClass>& b) {
    if (!b) return true;
    if (a.q != b->q) return a.q < b->q;
    return lex_less(a.d, b->d);
}

/// Nearest integer vector with the given parity step (1: any, 2: even) and
/// prescribed sum, by rounding and then fixing the sum along the components
/// with the largest rounding slack.
inline DegreeClass nearest_on_hyperplane(const Eigen::VectorXd& J, int target_sum, int step) {
    const Eigen::Index n = J.size();
    DegreeClass d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = step * static_cast<int>(std::lround(J[i] / step));
    int defect = target_sum - d.sum();
    while (defect != 0) {
        const int dir = defect > 0 ? 1 : -1;
        Eigen::Index best = 0;
        double best_gain = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double after = std::abs(d[i] + dir * step - J[i]) - std::abs(d[i] - J[i]);
            if (after < best_gain) best_gain = after, best = i;
        }
        d[best] += dir * step;
        defect -= dir * step;
    }
    return d;
}

}  // namespace detail

/**
 * Exhaustive minimization of q over the degree hyperplane inside a certified
 * ball |d - J| <= R, with R^2 = lambda_max(D) * max(q(known feasible),
 * q(known even), q(known odd-containing)). No class outside the ball can beat
 * the known representatives because q(d) >= |d - J|^2 / lambda_max on the
 * hyperplane.
 */
inline CriterionReport enumerate_and_minimize(const QuadraticForm& form, const CriterionOptions& opt = {}) {
    CriterionReport rep;
    rep.n = form.size();
    rep.outer_degree = form.outer_degree();
    rep.D = form.D();
    rep.J = form.J();
    rep.J_raw = form.J_raw();
    rep.outside_hypothesis = form.outer_degree() % 2 != 0;
    rep.tie_tol_user = opt.tie_tol.has_value();
    rep.tie_tol = opt.tie_tol.value_or(3.0 * opt.flux_error);
    const int n = rep.n;
    if (n == 0) {
        rep.simply_connected = true;
        rep.verdict = rep.outside_hypothesis ? Verdict::AllMinimizersNonOrientable : Verdict::AllMinimizersOrientable;
        return rep;
    }
    if (n > opt.max_holes) throw DomainError("enumeration refused: " + std::to_string(n) + " holes exceeds the limit");
    const int target = -form.outer_degree();
    const Eigen::VectorXd& J = form.J();

    std::vector<DegreeClass> seeds{detail::nearest_on_hyperplane(J, target, 1)};
    if (target % 2 == 0) seeds.push_back(detail::nearest_on_hyperplane(J, target, 2));
    if (n >= 2) {
        // An odd-containing class: move one unit between two components of the nearest even point.
        const DegreeClass base = target % 2 == 0 ? seeds.back() : seeds.front();
        std::optional<EvaluatedClass> odd;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                DegreeClass d = base;
                d[i] += 1, d[j] -= 1;
                EvaluatedClass ec{d, form.value(d), is_even_class(d)};
                if (!ec.even && detail::better(ec, odd)) odd = ec;
            }
        }
        if (odd) seeds.push_back(odd->d);
    }
    double q_known = 0.0;
    for (const auto& d : seeds) q_known = std::max(q_known, form.value(d));
    const double R2 = form.lambda_max() * q_known * (1.0 + 1e-9) + 1e-12;
    const double R = std::sqrt(R2);
    rep.radius = R;

    std::vector<int> lo(n), hi(n);
    double box = 1.0;
    for (int i = 0; i < n; ++i) {
        lo[i] = static_cast<int>(std::ceil(J[i] - R));
        hi[i] = static_cast<int>(std::floor(J[i] + R));
        if (i < n - 1) box *= std::max(1, hi[i] - lo[i] + 1);
    }
    if (box > static_cast<double>(opt.max_box)) {
        throw DomainError("enumeration refused: box holds " + std::to_string(box) + " points");
    }

    DegreeClass d(n);
    std::vector<EvaluatedClass> found;
    auto visit = [&](auto&& self, int i, int partial_sum, double partial_norm) -> void {
        if (i == n - 1) {
            d[i] = target - partial_sum;
            const double r = d[i] - J[i];
            if (partial_norm + r * r > R2) return;
            found.push_back({d, form.value(d), is_even_class(d)});
            return;
        }
        for (int v = lo[i]; v <= hi[i]; ++v) {
            const double r = v - J[i];
            if (partial_norm + r * r > R2) continue;
            d[i] = v;
            self(self, i + 1, partial_sum + v, partial_norm + r * r);
        }
    };
    visit(visit, 0, 0, 0.0);
    for (const auto& sd : seeds) {
        const bool present = std::any_of(found.begin(), found.end(), [&](const EvaluatedClass& e) { return e.d == sd; });
        if (!present) found.push_back({sd, form.value(sd), is_even_class(sd)});
    }
    std::sort(found.begin(), found.end(), [](const EvaluatedClass& a, const EvaluatedClass& b) {
        if (a.q != b.q) return a.q < b.q;
        return detail::lex_less(a.d, b.d);
    });
    for (const auto& ec : found) {
        if (detail::better(ec, rep.best)) rep.best = ec;
        if (ec.even && detail::better(ec, rep.best_even)) rep.best_even = ec;
        if (!ec.even && detail::better(ec, rep.best_odd)) rep.best_odd = ec;
    }
    rep.classes = std::move(found);

    if (!rep.best_even) {
        rep.verdict = Verdict::AllMinimizersNonOrientable;
    } else if (!rep.best_odd) {
        rep.verdict = Verdict::AllMinimizersOrientable;
    } else {
        const Eigen::VectorXd diff = (rep.best_even->d - rep.best_odd->d).cast<double>();
        const double sensitivity = (2.0 * form.pseudo_inverse() * diff).lpNorm<1>();
        rep.tie_tol_q = rep.tie_tol * sensitivity;
        rep.tie_margin = rep.best_odd->q - rep.best_even->q;
        if (rep.tie_margin < -rep.tie_tol_q) {
            rep.verdict = Verdict::AllMinimizersNonOrientable;
        } else if (rep.tie_margin > rep.tie_tol_q) {
            rep.verdict = Verdict::AllMinimizersOrientable;
        } else {
            rep.verdict = rep.tie_tol_user ? Verdict::BothKindsExist : Verdict::NumericallyIndeterminate;
        }
    }
    return rep;
}

/// Closed-form verdict for two holes (outer degree 2): compare the distances
/// of J1 to the even and to the odd integers. `tie_tol` is in units of J.
inline Verdict two_hole_verdict(double J1, double tie_tol = 0.0) {
    const double de = std::abs(J1 - 2.0 * std::round(J1 / 2.0));
    const double dodd = std::abs(J1 - (2.0 * std::round((J1 - 1.0) / 2.0) + 1.0));
    if (dodd < de - 2.0 * tie_tol) return Verdict::AllMinimizersNonOrientable;
    if (de < dodd - 2.0 * tie_tol) return Verdict::AllMinimizersOrientable;
    return Verdict::BothKindsExist;
}

/// Minimal (s^2/2) int |grad Q|^2 over the degree class: (s^2/2)(2 pi q + int |grad h(g)|^2).
inline double q_energy(double q, double hg_energy, double s) {
    return 0.5 * s * s * (2.0 * std::numbers::pi * q + hg_energy);
}

struct MinimizerField {
    DegreeClass d;
    Eigen::VectorXd c;
    Eigen::VectorXd phi;
    Eigen::VectorXd psi;            ///< phase along a spanning tree
    std::vector<AuxValue> m;        ///< e^{i psi}, equal to A(Q)
    std::vector<QTensor2> q;
    std::vector<double> hole_flux;  ///< (1/2 pi) flux of phi through each hole
    std::vector<int> hole_winding;  ///< winding of m along each hole (material on the left)
    double energy_phi = 0.0;        ///< int |grad phi|^2
    double energy_m = 0.0;          ///< int |grad m|^2 of the P1 interpolant
    double max_cotree_defect = 0.0; ///< distance of cotree phase jumps from 2 pi Z
};

struct ReconstructionInputs {
    const LaplaceSystem* sys;
    const BoundaryData* bd;
    const HarmonicField* hg;
    const std::vector<HarmonicField>* hi;
    const QuadraticForm* form;
};

/**
 * Phi = h(g) + sum c_i h_i, the phase psi integrated from its gradient
 * (-Phi_y, Phi_x) along a breadth-first spanning tree of the triangle
 * adjacency graph rooted at triangle 0, with the additive constant chosen to
 * match arg A(g) on the outer boundary.
 */
inline MinimizerField reconstruct_minimizer(const ReconstructionInputs& in, const DegreeClass& d, double s) {
    const LaplaceSystem& sys = *in.sys;
    const Mesh& mesh = sys.mesh();
    const OrderParameter sp(s);
    const double two_pi = 2.0 * std::numbers::pi;
    MinimizerField out;
    out.d = d;
    out.c = in.form->solve_c(d);
    out.phi = in.hg->u;
    for (Eigen::Index i = 0; i < out.c.size(); ++i) out.phi += out.c[i] * (*in.hi)[i].u;
    out.energy_phi = sys.energy(out.phi);

    const Eigen::VectorXd r = sys.stiffness() * out.phi - neumann_load(mesh, *in.bd);
    out.hole_flux.assign(mesh.hole_count, 0.0);
    for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
        const int loop = sys.node_loop()[v];
        if (loop >= 1) out.hole_flux[loop - 1] += r[static_cast<Eigen::Index>(v)] / two_pi;
    }
    for (int i = 0; i < mesh.hole_count; ++i) {
        if (std::abs(out.hole_flux[i] - d[i]) > 0.05) {
            throw DataError("flux of the reconstructed potential through hole " + std::to_string(i + 1) + " is " +
                            std::to_string(out.hole_flux[i]) + ", expected " + std::to_string(d[i]));
        }
    }

    // The rotated gradient of a discrete harmonic P1 field has zero circulation
    // around every median dual cell of an interior node, so the phase is
    // path independent on centroids and edge midpoints. Integrate it across
    // the triangle adjacency graph, then evaluate at nodes by circular mean.
    const std::size_t nt = mesh.triangles.size();
    std::vector<Vec2> rot(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        const double area2 = 2.0 * mesh.triangle_area(t);
        Vec2 g{0, 0};
        for (int k = 0; k < 3; ++k) {
            const Vec2 e = mesh.nodes[tri[(k + 2) % 3]] - mesh.nodes[tri[(k + 1) % 3]];
            // grad lambda_k is the opposite edge rotated by +90 degrees over twice the area.
            g = g + Vec2{-e.y, e.x} * (out.phi[tri[k]] / area2);
        }
        rot[t] = Vec2{-g.y, g.x};
    }
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            edge_tris[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(t));
        }
    }
    std::vector<std::vector<std::pair<int, double>>> tadj(nt);
    for (const auto& [key, ts] : edge_tris) {
        if (ts.size() != 2) continue;
        const Vec2 mid = (mesh.nodes[key.first] + mesh.nodes[key.second]) * 0.5;
        const int t0 = ts[0], t1 = ts[1];
        const double inc = rot[t0].dot(mid - mesh.centroid(t0)) + rot[t1].dot(mesh.centroid(t1) - mid);
        tadj[t0].push_back({t1, inc});
        tadj[t1].push_back({t0, -inc});
    }
    std::vector<double> psi_t(nt, 0.0);
    std::vector<char> seen(nt, 0);
    std::queue<int> bfs;
    seen[0] = 1;
    bfs.push(0);
    while (!bfs.empty()) {
        const int u = bfs.front();
        bfs.pop();
        for (const auto& [w, inc] : tadj[u]) {
            if (!seen[w]) {
                seen[w] = 1;
                psi_t[w] = psi_t[u] + inc;
                bfs.push(w);
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw DomainError("mesh is not connected");
    for (std::size_t u = 0; u < nt; ++u) {
        for (const auto& [w, inc] : tadj[u]) {
            const double jump = psi_t[w] - psi_t[u] - inc;
            const double defect = std::abs(jump - two_pi * std::round(jump / two_pi));
            out.max_cotree_defect = std::max(out.max_cotree_defect, defect);
        }
    }
    if (out.max_cotree_defect > 0.25) {
        throw DataError("phase reconstruction defect " + std::to_string(out.max_cotree_defect) +
                        " rad; the potential is not discretely harmonic");
    }
    const std::size_t nn = mesh.nodes.size();
    std::vector<std::complex<double>> star(nn, {0.0, 0.0});
    std::vector<double> first(nn, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = 0; t < nt; ++t) {
        for (int v : mesh.triangles[t]) {
            const double value = psi_t[t] + rot[t].dot(mesh.nodes[v] - mesh.centroid(t));
            star[v] += std::polar(1.0, value);
            if (std::isnan(first[v])) first[v] = value;
        }
    }
    out.psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nn));
    for (std::size_t v = 0; v < nn; ++v) {
        // Continuous lift near the first star value keeps psi readable.
        const double delta = std::arg(star[v] * std::polar(1.0, -first[v]));
        out.psi[static_cast<Eigen::Index>(v)] = first[v] + delta;
    }
    std::complex<double> align{0, 0};
    for (std::size_t k = 0; k < in.bd->nodes.size(); ++k) {
        align += std::polar(1.0, in.bd->a[k].angle() - out.psi[in.bd->nodes[k]]);
    }
    out.psi.array() += std::arg(align);

    out.m.reserve(nn);
    out.q.reserve(nn);
    Eigen::VectorXd m1(static_cast<Eigen::Index>(nn)), m2(static_cast<Eigen::Index>(nn));
    for (std::size_t v = 0; v < nn; ++v) {
        const AuxValue a = AuxValue::from_angle(out.psi[static_cast<Eigen::Index>(v)]);
        out.m.push_back(a);
        out.q.push_back(aux_inverse(a, sp));
        m1[static_cast<Eigen::Index>(v)] = a.re;
        m2[static_cast<Eigen::Index>(v)] = a.im;
    }
    out.energy_m = sys.energy(m1) + sys.energy(m2);
    for (int i = 1; i <= mesh.hole_count; ++i) {
        std::vector<AuxValue> loop;
        for (int v : mesh.loop_nodes(i)) loop.push_back(out.m[v]);
        out.hole_winding.push_back(winding_number(std::span<const AuxValue>(loop)));
    }
    return out;
}

namespace detail {
inline std::string fmt(double x) {
    std::ostringstream s;
    s.precision(12);
    s << x;
    return s.str();
}
inline std::string vec_text(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(v[i]);
    return out;
}
inline std::string vec_text(const Eigen::VectorXi& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
    return out;
}
}  // namespace detail

/// Extra quantities that only the full pipeline knows.
struct ReportContext {
    std::string domain;
    double h = 0.0;
    double s = 1.0;
    std::size_t nodes = 0;
    std::size_t triangles = 0;
    double flux_error = 0.0;
    Eigen::VectorXd J_cross;
    double hg_energy = 0.0;
};

inline std::string report_text(const CriterionReport& rep, const ReportContext& ctx) {
    std::ostringstream out;
    auto kv = [&](const std::string& k, const std::string& v) { out << k << " = " << v << "\n"; };
    kv("domain", ctx.domain);
    kv("h", detail::fmt(ctx.h));
    kv("s", detail::fmt(ctx.s));
    kv("nodes", std::to_string(ctx.nodes));
    kv("triangles", std::to_string(ctx.triangles));
    kv("holes", std::to_string(rep.n));
    kv("outer_degree", std::to_string(rep.outer_degree));
    if (rep.outside_hypothesis) kv("note", "outer degree is odd; boundary data is not orientable");
    kv("verdict", to_string(rep.verdict));
    if (rep.simply_connected) {
        kv("simply_connected", "true");
        return out.str();
    }
    for (int i = 0; i < rep.n; ++i) kv("D_row_" + std::to_string(i + 1), detail::vec_text(Eigen::VectorXd(rep.D.row(i))));
    kv("J", detail::vec_text(rep.J_raw));
    kv("J_projected", detail::vec_text(rep.J));
    if (ctx.J_cross.size() == rep.n) kv("J_cross_check", detail::vec_text(ctx.J_cross));
    kv("flux_error", detail::fmt(ctx.flux_error));
    kv("J_sum_plus_degree", detail::fmt(rep.J_raw.sum() + rep.outer_degree));
    kv("hg_energy", detail::fmt(ctx.hg_energy));
    if (rep.best) {
        kv("best_class", detail::vec_text(rep.best->d));
        kv("best_q", detail::fmt(rep.best->q));
        kv("best_energy", detail::fmt(q_energy(rep.best->q, ctx.hg_energy, ctx.s)));
    }
    if (rep.best_even) {
        kv("best_even_class", detail::vec_text(rep.best_even->d));
        kv("best_even_q", detail::fmt(rep.best_even->q));
        kv("best_even_energy", detail::fmt(q_energy(rep.best_even->q, ctx.hg_energy, ctx.s)));
    }
    if (rep.best_odd) {
        kv("best_odd_class", detail::vec_text(rep.best_odd->d));
        kv("best_odd_q", detail::fmt(rep.best_odd->q));
    }
    kv("tie_margin", detail::fmt(rep.tie_margin));
    kv("tie_tol", detail::fmt(rep.tie_tol));
    kv("tie_tol_q", detail::fmt(rep.tie_tol_q));
    kv("tie_tol_source", rep.tie_tol_user ? "user" : "flux_error");
    kv("enumeration_radius", detail::fmt(rep.radius));
    kv("classes_evaluated", std::to_string(rep.classes.size()));
    return out.str();
}

inline std::string report_csv(const CriterionReport& rep, const ReportContext& ctx) {
    std::ostringstream out;
    for (int i = 0; i < rep.n; ++i) out << "d_" << i + 1 << ",";
    out << "q,even,energy\n";
    for (const auto& ec : rep.classes) {
        for (int i = 0; i < rep.n; ++i) out << ec.d[i] << ",";
        out << detail::fmt(ec.q) << "," << (ec.even ? 1 : 0) << "," << detail::fmt(q_energy(ec.q, ctx.hg_energy, ctx.s))
            << "\n";
    }
    return out.str();
}

inline std::string minimizer_csv(const Mesh& mesh, const MinimizerField& f) {
    std::ostringstream out;
    out.precision(12);
    out << "node_index,x,y,psi,m1,m2,q11,q12\n";
    for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
        out << v + 1 << ',' << mesh.nodes[v].x << ',' << mesh.nodes[v].y << ',' << f.psi[static_cast<Eigen::Index>(v)]
            << ',' << f.m[v].re << ',' << f.m[v].im << ',' << f.q[v].q11 << ',' << f.q[v].q12 << "\n";
    }
    return out.str();
}

}  // namespace lineorient
