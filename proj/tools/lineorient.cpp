// Command-line front end: analyze, sweep, bisect, liftcheck, mesh.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lineorient/analysis.hpp"
#include "lineorient/io.hpp"
#include "lineorient/lifting.hpp"
#include "lineorient/mesh_io.hpp"
#include "lineorient/svg.hpp"

namespace fs = std::filesystem;
using namespace lineorient;

namespace {

struct CommonArgs {
    std::string preset = "stadium";
    std::optional<double> delta, rho, hole_radius, param;
    double h = 0.05;
    double s = 1.0;
    int refine = 0;
    bool symmetric = false;
    std::optional<double> tie_tol;
    std::string boundary;
    std::string out = "out";
    unsigned seed = 1;

    AnalysisConfig config() const {
        AnalysisConfig cfg;
        cfg.preset = preset;
        if (param) cfg.param = param;
        if (preset == "stadium" && delta) cfg.param = delta;
        if (preset == "stadium_asym" && rho) cfg.param = rho;
        if (preset == "offset_annulus" && delta) cfg.param = std::sqrt(*delta);
        if (preset == "offset_annulus" && hole_radius) cfg.param = hole_radius;
        cfg.h = h;
        cfg.s = s;
        cfg.refine = refine;
        cfg.symmetric = symmetric;
        cfg.tie_tol = tie_tol;
        if (!boundary.empty()) cfg.boundary_csv = read_text(boundary);
        if (!(h > 0)) throw ConfigError("h must be positive");
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--preset", a.preset, "domain preset")
        ->check(CLI::IsMember({"disk", "annulus", "stadium", "stadium_asym", "offset_annulus", "horseshoe", "square",
                               "three_hole_disk"}));
    cmd->add_option("--delta", a.delta, "stadium: half-length (> 1); offset_annulus: hole radius squared");
    cmd->add_option("--rho", a.rho, "stadium_asym: squared radius of the upper hole, in (0, 1)");
    cmd->add_option("--hole-radius", a.hole_radius, "offset_annulus: radius of the small hole, in (0, 1/4)");
    cmd->add_option("--param", a.param, "preset parameter (generic form)");
    cmd->add_option("--h", a.h, "target mesh edge length");
    cmd->add_option("--s", a.s, "scalar order parameter, nonzero in [-1/2, 1]");
    cmd->add_option("--refine", a.refine, "uniform refinements after meshing");
    cmd->add_flag("--symmetric", a.symmetric, "stadium: mesh the upper half and reflect it");
    cmd->add_option("--tie-tol", a.tie_tol, "tie tolerance in units of J (default: 3x flux error)");
    cmd->add_option("--boundary", a.boundary, "boundary data CSV 't,q11,q12' (default: tangential)");
    cmd->add_option("--out", a.out, "output directory");
    cmd->add_option("--seed", a.seed, "seed recorded with the run");
}

std::string run_header(const CommonArgs& a, const char* command) {
    std::ostringstream out;
    out << "command = " << command << "\nseed = " << a.seed << "\n";
    return out.str();
}

int exit_code(Verdict v) { return v == Verdict::NumericallyIndeterminate ? 2 : 0; }

int cmd_analyze(const CommonArgs& args) {
    const AnalysisConfig cfg = args.config();
    const Analysis a = analyze(cfg);
    const fs::path dir = args.out;
    std::string text = run_header(args, "analyze") + report_text(a.report, a.ctx);
    std::vector<QTensor2> field;
    if (a.report.n > 0 && a.report.best) {
        const MinimizerField m = reconstruct_minimizer(a.reconstruction_inputs(), a.report.best->d, cfg.s);
        std::ostringstream extra;
        extra.precision(12);
        extra << "minimizer_class = " << detail::vec_text(m.d) << "\n";
        extra << "minimizer_hole_windings = ";
        for (std::size_t i = 0; i < m.hole_winding.size(); ++i) extra << (i ? " " : "") << m.hole_winding[i];
        extra << "\nminimizer_energy_phi = " << m.energy_phi << "\nminimizer_energy_m = " << m.energy_m
              << "\nminimizer_cotree_defect = " << m.max_cotree_defect << "\n";
        text += extra.str();
        write_atomic(dir / "minimizer.csv", minimizer_csv(*a.mesh, m));
        field = m.q;
    } else {
        // Simply connected: the harmonic extension of the boundary phase is the minimizer.
        field.assign(a.mesh->nodes.size(), aux_inverse(AuxValue{1, 0}, OrderParameter(cfg.s)));
    }
    text += "runtime_seconds = " + detail::fmt(a.seconds) + "\n";
    write_atomic(dir / "classes.csv", report_csv(a.report, a.ctx));
    if (a.report.n > 0) write_atomic(dir / "hg.csv", field_csv(*a.mesh, a.hg.u));
    if (a.report.n > 0) write_atomic(dir / "lines.svg", line_field_svg(*a.mesh, field, a.spec.name));
    write_atomic(dir / "report.txt", text);
    std::cout << text;
    return exit_code(a.report.verdict);
}

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad parameter value '" + item + "'");
        }
    }
    return out;
}

int cmd_sweep(const CommonArgs& args, const std::string& values, int workers) {
    std::vector<double> params = parse_values(values);
    if (params.empty()) throw ConfigError("sweep needs --values");
    std::sort(params.begin(), params.end());
    const auto points = sweep(args.config(), params, workers);
    const std::string csv = sweep_csv(points);
    write_atomic(fs::path(args.out) / "sweep.csv", csv);
    std::cout << csv;
    return 0;
}

int cmd_bisect(const CommonArgs& args, int component, double target, double lo, double hi, double tol,
               bool log_scale) {
    BisectOptions opt;
    opt.tol = tol;
    opt.log_scale = log_scale;
    const BisectResult r = bisect(args.config(), component, target, lo, hi, opt);
    std::ostringstream out;
    out.precision(12);
    out << run_header(args, "bisect") << "component = " << component << "\ntarget = " << target
        << "\nparam = " << r.param << "\nvalue = " << r.value << "\niterations = " << r.iterations << "\n";
    if (r.analysis) out << report_text(r.analysis->report, r.analysis->ctx);
    write_atomic(fs::path(args.out) / "bisect.txt", out.str());
    std::cout << out.str();
    return r.analysis ? exit_code(r.analysis->report.verdict) : 0;
}

int cmd_liftcheck(const CommonArgs& args, const std::string& field_name, const std::string& mesh_stem,
                  const std::string& field_file) {
    Mesh mesh;
    std::vector<QTensor2> q;
    const OrderParameter s(args.s);
    if (!mesh_stem.empty()) {
        mesh = read_mesh(mesh_stem);
        std::istringstream in(read_text(field_file));
        std::string line;
        q.assign(mesh.nodes.size(), QTensor2{0, 0, s});
        std::vector<char> seen(mesh.nodes.size(), 0);
        while (std::getline(in, line)) {
            if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ss(line);
            long idx;
            double q11, q12;
            if (!(ss >> idx >> q11 >> q12) || idx < 1 || idx > static_cast<long>(mesh.nodes.size())) {
                throw DataError("field rows must be 'node_index,q11,q12'");
            }
            q[idx - 1] = {q11, q12, s};
            seen[idx - 1] = 1;
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw DataError("field file misses some nodes");
    } else if (field_name == "constant") {
        mesh = triangulate(preset::annulus(), args.h);
        q = sample_field(mesh, [](const Vec2&) { return Director2{1, 0}; }, s);
    } else {
        const CanonicalField cf = canonical_field(field_name);
        MeshOptions mo;
        mo.min_arc_segments = cf.min_arc_segments;
        mesh = triangulate(cf.domain, args.h, mo);
        q = sample_field(mesh, cf.director, s);
    }
    const FieldLift lift = lift_field(mesh, q);
    std::ostringstream out;
    out << run_header(args, "liftcheck") << "field = " << (mesh_stem.empty() ? field_name : field_file) << "\n";
    out << "nodes = " << mesh.nodes.size() << "\nmax_edge_step = " << lift.max_edge_step
        << "\nstep_bound = " << lift_step_bound(s) << "\n";
    out << "interior = " << (lift.orientable ? "orientable" : "non-orientable") << "\n";
    bool all_even = true;
    for (int loop = 0; loop <= mesh.hole_count; ++loop) {
        std::vector<QTensor2> samples;
        for (int v : mesh.loop_nodes(loop)) samples.push_back(q[v]);
        const auto b = boundary_orientable(samples);
        all_even = all_even && b.orientable;
        out << "loop_" << loop << "_degree = " << b.degree << "\nloop_" << loop
            << "_parity = " << (b.orientable ? "even" : "odd") << "\n";
    }
    out << "boundary = " << (all_even ? "orientable" : "non-orientable") << "\n";
    out << "consistent = " << (all_even == lift.orientable ? "true" : "false") << "\n";
    if (!lift.orientable) {
        std::ostringstream w;
        w.precision(12);
        w << "node_index,x,y\n";
        for (int v : lift.witness) w << v + 1 << ',' << mesh.nodes[v].x << ',' << mesh.nodes[v].y << "\n";
        write_atomic(fs::path(args.out) / "witness.csv", w.str());
        out << "witness_length = " << lift.witness.size() << "\nwitness_sign = " << cycle_sign(lift.witness, q)
            << "\n";
    }
    write_atomic(fs::path(args.out) / "liftcheck.txt", out.str());
    std::cout << out.str();
    return all_even == lift.orientable ? 0 : 1;
}

int cmd_mesh(const CommonArgs& args, const std::string& stem) {
    const AnalysisConfig cfg = args.config();
    const DomainSpec spec = preset::by_name(cfg.preset, cfg.param);
    const Mesh mesh = build_mesh(spec, cfg);
    const fs::path base = stem.empty() ? fs::path(args.out) / spec.name : fs::path(stem);
    write_mesh(mesh, base);
    std::cout << "nodes = " << mesh.nodes.size() << "\ntriangles = " << mesh.triangles.size()
              << "\nholes = " << mesh.hole_count << "\nmin_angle = " << mesh.min_angle_degrees() << "\nfiles = "
              << base.string() << ".{node,ele,edge}\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orientability of line-field energy minimizers on planar domains with holes"};
    app.set_help_flag("--help", "print this help and exit");
    app.set_config("--config", "", "INI file with [command] sections; flags override it");
    app.require_subcommand(1);

    CommonArgs analyze_args, sweep_args, bisect_args, lift_args, mesh_args;
    auto* analyze_cmd = app.add_subcommand("analyze", "mesh, solve and report the verdict");
    add_common(analyze_cmd, analyze_args);

    auto* sweep_cmd = app.add_subcommand("sweep", "analyze over a list of preset parameter values");
    add_common(sweep_cmd, sweep_args);
    std::string values;
    int workers = 1;
    sweep_cmd->add_option("--values", values, "comma-separated parameter values")->required();
    sweep_cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

    auto* bisect_cmd = app.add_subcommand("bisect", "find the parameter where a flux component hits a target");
    add_common(bisect_cmd, bisect_args);
    int component = 1;
    double target = -0.5, lo = 0.0, hi = 0.0, btol = 0.005;
    bool log_scale = false;
    bisect_cmd->add_option("--component", component, "1-based hole index of J");
    bisect_cmd->add_option("--target", target, "target value of J_component");
    bisect_cmd->add_option("--lo", lo, "lower parameter bracket")->required();
    bisect_cmd->add_option("--hi", hi, "upper parameter bracket")->required();
    bisect_cmd->add_option("--tol", btol, "stop when |J - target| is below this");
    bisect_cmd->add_flag("--log", log_scale, "bisect in log(parameter)");

    auto* lift_cmd = app.add_subcommand("liftcheck", "lift a line field over a mesh and report orientability");
    add_common(lift_cmd, lift_args);
    std::string field_name = "horseshoe", mesh_stem, field_file;
    lift_cmd->add_option("--field", field_name, "horseshoe, half_index, tangential_outer or constant");
    lift_cmd->add_option("--mesh", mesh_stem, "mesh file stem (with --field-file)");
    lift_cmd->add_option("--field-file", field_file, "CSV 'node_index,q11,q12' on the mesh");

    auto* mesh_cmd = app.add_subcommand("mesh", "build and export a mesh");
    add_common(mesh_cmd, mesh_args);
    std::string stem;
    mesh_cmd->add_option("--stem", stem, "output file stem");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*analyze_cmd) return cmd_analyze(analyze_args);
        if (*sweep_cmd) return cmd_sweep(sweep_args, values, workers);
        if (*bisect_cmd) return cmd_bisect(bisect_args, component, target, lo, hi, btol, log_scale);
        if (*lift_cmd) {
            if (mesh_stem.empty() != field_file.empty()) throw ConfigError("--mesh and --field-file go together");
            return cmd_liftcheck(lift_args, field_name, mesh_stem, field_file);
        }
        if (*mesh_cmd) return cmd_mesh(mesh_args, stem);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
