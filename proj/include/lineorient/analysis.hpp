/**
 * @file analysis.hpp
 * @brief End-to-end pipeline: preset domain -> mesh -> boundary data ->
 *        harmonic solves -> criterion report, plus parameter sweeps and
 *        bisection on a flux component.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lineorient/criterion.hpp"
#include "lineorient/geometry.hpp"
#include "lineorient/harmonic.hpp"
#include "lineorient/mesher.hpp"

namespace lineorient {

struct AnalysisConfig {
    std::string preset = "stadium";
    std::optional<double> param;  ///< delta, rho or hole radius depending on the preset
    double h = 0.05;
    double s = 1.0;
    int refine = 0;                ///< uniform refinements applied after meshing
    bool symmetric = false;        ///< stadium only: mesh the upper half and reflect it
    std::optional<double> tie_tol;
    std::optional<std::string> boundary_csv;  ///< contents of a "t,q11,q12" file; tangential data if unset
    MeshOptions mesh;
    FluxOptions flux;
    SolverSettings solver;
};

struct Analysis {
    DomainSpec spec;
    std::shared_ptr<const Mesh> mesh;
    BoundaryData bd;
    std::shared_ptr<const LaplaceSystem> sys;
    HarmonicField hg;
    std::vector<HarmonicField> hi;
    FluxResult flux;
    std::shared_ptr<const QuadraticForm> form;
    CriterionReport report;
    ReportContext ctx;
    double seconds = 0.0;

    ReconstructionInputs reconstruction_inputs() const { return {sys.get(), &bd, &hg, &hi, form.get()}; }
};

inline Mesh build_mesh(const DomainSpec& spec, const AnalysisConfig& cfg) {
    Mesh mesh;
    if (cfg.symmetric) {
        if (spec.name != "stadium") throw ConfigError("symmetric meshing is only available for the stadium");
        mesh = triangulate_stadium_symmetric(cfg.param.value_or(2.0), cfg.h, cfg.mesh);
    } else {
        mesh = triangulate(spec, cfg.h, cfg.mesh);
    }
    for (int r = 0; r < cfg.refine; ++r) mesh = refine_uniform(mesh, spec);
    return mesh;
}

inline Analysis analyze(const AnalysisConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    Analysis a;
    a.spec = preset::by_name(cfg.preset, cfg.param);
    const OrderParameter s(cfg.s);
    a.mesh = std::make_shared<const Mesh>(build_mesh(a.spec, cfg));
    const Mesh& mesh = *a.mesh;
    a.bd = cfg.boundary_csv ? tabulated_boundary_data(a.spec, mesh, s, parse_boundary_csv(*cfg.boundary_csv))
                            : tangential_boundary_data(a.spec, mesh, s);
    a.ctx.domain = a.spec.name;
    a.ctx.h = cfg.h;
    a.ctx.s = s;
    a.ctx.nodes = mesh.nodes.size();
    a.ctx.triangles = mesh.triangles.size();
    const int n = mesh.hole_count;
    CriterionOptions copt;
    copt.tie_tol = cfg.tie_tol;
    if (n == 0) {
        a.form = std::make_shared<const QuadraticForm>(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0), a.bd.degree);
        a.report = enumerate_and_minimize(*a.form, copt);
    } else {
        a.sys = std::make_shared<const LaplaceSystem>(LaplaceSystem::holes_dirichlet(mesh, cfg.solver));
        for (int i = 1; i <= n; ++i) a.hi.push_back(solve_hi(*a.sys, i));
        a.hg = solve_hg(*a.sys, a.bd);
        a.flux = compute_J(*a.sys, a.hg, a.bd, a.hi, cfg.flux);
        const Eigen::MatrixXd D = assemble_D(*a.sys, a.hi);
        a.form = std::make_shared<const QuadraticForm>(D, a.flux.J, a.bd.degree);
        copt.flux_error = a.flux.error;
        a.report = enumerate_and_minimize(*a.form, copt);
        a.ctx.flux_error = a.flux.error;
        a.ctx.J_cross = a.flux.J_cross;
        a.ctx.hg_energy = field_energy(*a.sys, a.hg);
    }
    a.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return a;
}

/// One row of a sweep; `error` is set when the point failed.
struct SweepPoint {
    double param = 0.0;
    std::optional<Analysis> analysis;
    std::string error;
};

/// Run analyze for every parameter value with up to `workers` threads.
/// Results are returned in the order of `params`.
inline std::vector<SweepPoint> sweep(const AnalysisConfig& base, const std::vector<double>& params, int workers = 1) {
    std::vector<SweepPoint> out(params.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < params.size(); k = next++) {
            AnalysisConfig cfg = base;
            cfg.param = params[k];
            out[k].param = params[k];
            try {
                out[k].analysis = analyze(cfg);
            } catch (const std::exception& e) {
                out[k].error = e.what();
            }
        }
    };
    const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(params.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return out;
}

inline std::string sweep_csv(const std::vector<SweepPoint>& points) {
    int n = 0;
    for (const auto& p : points) {
        if (p.analysis) n = std::max(n, p.analysis->report.n);
    }
    std::ostringstream out;
    out << "param";
    for (int i = 1; i <= n; ++i) out << ",J_" << i;
    out << ",q_best,q_even,q_odd,verdict,error\n";
    out.precision(12);
    for (const auto& p : points) {
        out << p.param;
        if (p.analysis) {
            const auto& r = p.analysis->report;
            for (int i = 0; i < n; ++i) {
                out << ',';
                if (i < r.n) out << r.J_raw[i];
            }
            auto q = [](const std::optional<EvaluatedClass>& c) { return c ? detail::fmt(c->q) : std::string(); };
            out << ',' << q(r.best) << ',' << q(r.best_even) << ',' << q(r.best_odd) << ',' << to_string(r.verdict)
                << ",\n";
        } else {
            for (int i = 0; i < n; ++i) out << ',';
            std::string msg = p.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            out << ",,,,error," << msg << "\n";
        }
    }
    return out.str();
}

struct BisectResult {
    double param = 0.0;
    double value = 0.0;  ///< J component at param
    int iterations = 0;
    std::optional<Analysis> analysis;
};

struct BisectOptions {
    double tol = 0.005;       ///< stop when |J - target| < tol
    double min_width = 1e-4;  ///< stop when the bracket is shorter (in log10 units when log_scale)
    bool log_scale = false;   ///< bisect log(param); for parameters spanning many decades
};

/// Bisection on the preset parameter for J_component(param) = target. The
/// target must be bracketed by the values at lo and hi.
inline BisectResult bisect(const AnalysisConfig& base, int component, double target, double lo, double hi,
                           const BisectOptions& opt = {}) {
    if (opt.log_scale && !(lo > 0 && hi > 0)) throw ConfigError("log-scale bisection needs a positive bracket");
    const double tol = opt.tol;
    auto eval = [&](double p) {
        AnalysisConfig cfg = base;
        cfg.param = p;
        Analysis a = analyze(cfg);
        if (component < 1 || component > a.report.n) throw ConfigError("flux component out of range");
        const double v = a.report.J_raw[component - 1];
        return std::pair<double, Analysis>{v, std::move(a)};
    };
    auto [flo, alo] = eval(lo);
    if (std::abs(flo - target) < tol) return {lo, flo, 0, std::move(alo)};
    auto [fhi, ahi] = eval(hi);
    if (std::abs(fhi - target) < tol) return {hi, fhi, 0, std::move(ahi)};
    if ((flo - target) * (fhi - target) > 0) {
        throw ConfigError("target " + std::to_string(target) + " is not bracketed: J(" + std::to_string(lo) +
                          ") = " + std::to_string(flo) + ", J(" + std::to_string(hi) + ") = " + std::to_string(fhi));
    }
    BisectResult res;
    for (int it = 1;; ++it) {
        const double mid = opt.log_scale ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        auto [fm, am] = eval(mid);
        res = {mid, fm, it, std::move(am)};
        const double width = opt.log_scale ? std::abs(std::log10(hi / lo)) : std::abs(hi - lo);
        if (std::abs(fm - target) < tol || width < opt.min_width) return res;
        if ((flo - target) * (fm - target) <= 0) {
            hi = mid;
        } else {
            lo = mid, flo = fm;
        }
    }
}

}  // namespace lineorient
