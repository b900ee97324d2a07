#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "lineorient/harmonic.hpp"
#include "lineorient/mesher.hpp"

using namespace lineorient;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> mirror_index(const Mesh& m) {
    std::map<std::pair<double, double>, int> index;
    for (std::size_t v = 0; v < m.nodes.size(); ++v) index[{m.nodes[v].x, m.nodes[v].y}] = static_cast<int>(v);
    std::vector<int> out;
    for (const auto& p : m.nodes) out.push_back(index.at({p.x, -p.y}));
    return out;
}

// Manufactured u = log r on the annulus 1/2 < r < 1, Dirichlet on both circles.
struct LogR {
    double energy, flux;
};

LogR solve_log_r(const Mesh& mesh) {
    const LaplaceSystem sys(mesh, {0, 1});
    Eigen::VectorXd dir(static_cast<Eigen::Index>(mesh.nodes.size()));
    for (std::size_t v = 0; v < mesh.nodes.size(); ++v) dir[v] = std::log(mesh.nodes[v].norm());
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dir.size());
    const HarmonicField u = sys.solve(dir, zero);
    return {sys.energy(u.u), sys.loop_flux(u.u, zero, 1)};
}

}  // namespace

TEST(LaplaceSystem, NeedsDirichletLoop) {
    const Mesh m = triangulate(preset::annulus(), 0.2);
    EXPECT_THROW(LaplaceSystem(m, {}), DomainError);
}

TEST(LaplaceSystem, StiffnessAnnihilatesConstantsAndLinears) {
    const Mesh m = triangulate(preset::stadium(2.0), 0.1);
    const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m);
    Eigen::VectorXd one = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m.nodes.size()));
    EXPECT_LT((sys.stiffness() * one).cwiseAbs().maxCoeff(), 1e-12);
    // A linear function has energy |grad|^2 times the area, up to boundary chords.
    Eigen::VectorXd x(one.size());
    for (std::size_t v = 0; v < m.nodes.size(); ++v) x[v] = m.nodes[v].x;
    double area = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) area += m.triangle_area(t);
    EXPECT_NEAR(sys.energy(x), area, 1e-9);
}

TEST(HoleHarmonics, AnnulusIsConstant) {
    const Mesh m = triangulate(preset::annulus(), 0.1);
    const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m);
    const HarmonicField h1 = solve_hi(sys, 1);
    EXPECT_LT((h1.u.array() - 1.0).abs().maxCoeff(), 1e-8);
    EXPECT_LT(field_energy(sys, h1), 1e-12);
    const Eigen::MatrixXd D = assemble_D(sys, {h1});
    EXPECT_LT(std::abs(D(0, 0)), 1e-12);
    EXPECT_THROW(solve_hi(sys, 2), DomainError);
}

TEST(HoleHarmonics, StadiumPartitionOfUnity) {
    const Mesh m = triangulate(preset::stadium(2.0), 0.05);
    const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m);
    const HarmonicField h1 = solve_hi(sys, 1), h2 = solve_hi(sys, 2);
    EXPECT_LT(((h1.u + h2.u).array() - 1.0).abs().maxCoeff(), 1e-8);
    EXPECT_GE(h1.u.minCoeff(), -1e-9);
    EXPECT_LE(h1.u.maxCoeff(), 1 + 1e-9);
}

TEST(HoleHarmonics, MirrorSymmetry) {
    const Mesh m = triangulate_stadium_symmetric(2.0, 0.05);
    const auto mirror = mirror_index(m);
    const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m);
    const HarmonicField h1 = solve_hi(sys, 1), h2 = solve_hi(sys, 2);
    double worst = 0.0;
    for (std::size_t v = 0; v < m.nodes.size(); ++v) worst = std::max(worst, std::abs(h1.u[v] - h2.u[mirror[v]]));
    EXPECT_LT(worst, 1e-8);
    const Eigen::MatrixXd D = assemble_D(sys, {h1, h2});
    EXPECT_NEAR(D(0, 0), D(1, 1), 1e-9);
    EXPECT_NEAR(D(0, 1), -D(0, 0), 1e-9);
    EXPECT_GT(D(0, 0), 0.0);
}

TEST(HarmonicG, ConstantDataVanishes) {
    const DomainSpec spec = preset::stadium(2.0);
    const Mesh m = triangulate(spec, 0.1);
    const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m);
    const BoundaryData bd = constant_boundary_data(spec, m, 1.0, {0, 1});
    const HarmonicField hg = solve_hg(sys, bd);
    EXPECT_EQ(hg.u.cwiseAbs().maxCoeff(), 0.0);
    const FluxResult J = compute_J(sys, hg, bd, {solve_hi(sys, 1), solve_hi(sys, 2)});
    EXPECT_LT(J.J.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(HarmonicG, StadiumSymmetricAndFluxMinusOne) {
    const DomainSpec spec = preset::stadium(2.0);
    const Mesh m = triangulate_stadium_symmetric(2.0, 0.05);
    const auto mirror = mirror_index(m);
    const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m);
    const BoundaryData bd = tangential_boundary_data(spec, m, 1.0);
    const HarmonicField hg = solve_hg(sys, bd);
    double worst = 0.0;
    for (std::size_t v = 0; v < m.nodes.size(); ++v) worst = std::max(worst, std::abs(hg.u[v] - hg.u[mirror[v]]));
    EXPECT_LT(worst, 1e-7 * std::max(1.0, hg.u.cwiseAbs().maxCoeff()));
    const FluxResult J = compute_J(sys, hg, bd, {solve_hi(sys, 1), solve_hi(sys, 2)});
    EXPECT_NEAR(J.J[0], -1.0, 0.01);
    EXPECT_NEAR(J.J[1], -1.0, 0.01);
    EXPECT_NEAR(J.J.sum(), -bd.degree, 1e-8);
    EXPECT_LT(J.error, 1e-6);
}

TEST(HarmonicG, FluxSumIdentityOnThreeHoles) {
    const DomainSpec spec = preset::three_hole_disk();
    const Mesh m = triangulate(spec, 0.1);
    const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m);
    // Non-tangential data: A(g) = exp(i(2 phi + 0.3 sin 3 phi)) along the outer circle.
    const BoundaryData bd = make_boundary_data(spec, m, 0.5, [](double t) {
        const double phi = 2 * kPi * t;
        return AuxValue::from_angle(2 * phi + 0.3 * std::sin(3 * phi));
    });
    std::vector<HarmonicField> hi;
    for (int i = 1; i <= 3; ++i) hi.push_back(solve_hi(sys, i));
    const FluxResult J = compute_J(sys, solve_hg(sys, bd), bd, hi);
    EXPECT_NEAR(J.J.sum(), -2.0, 1e-8);
    EXPECT_LT(J.error, 1e-3);
    const Eigen::MatrixXd D = assemble_D(sys, hi);
    EXPECT_LT((D - D.transpose()).norm(), 1e-14);
    EXPECT_LT((D * Eigen::Vector3d::Ones()).norm(), 1e-8 * D.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(D);
    EXPECT_LT(std::abs(eig.eigenvalues()[0]), 1e-8);
    EXPECT_GT(eig.eigenvalues()[1], 1e-3);
}

TEST(HarmonicG, BoundedAsTheHoleShrinks) {
    double bound = 0.0;
    std::vector<double> sup;
    for (double r : {0.2, 0.1, 0.05, 0.02}) {
        const DomainSpec spec = preset::offset_annulus(r);
        const Mesh m = triangulate(spec, 0.05);
        const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m);
        const HarmonicField hg = solve_hg(sys, tangential_boundary_data(spec, m, 1.0));
        sup.push_back(hg.u.cwiseAbs().maxCoeff());
        bound = std::max(bound, sup.back());
    }
    EXPECT_LT(bound, 2.0 * sup.front());
}

TEST(Energy, ManufacturedLogR) {
    const DomainSpec spec = preset::annulus();
    const double exact = 2 * kPi * std::log(2.0);
    Mesh m = triangulate(spec, 0.1);
    std::vector<double> err;
    for (int level = 0; level < 3; ++level) {
        err.push_back(std::abs(solve_log_r(m).energy - exact));
        m = refine_uniform(m, spec);
    }
    EXPECT_LT(err[0] / exact, 0.01);
    // Second order: each halving of h divides the error by about four.
    EXPECT_GT(err[0] / err[1], 3.0);
    EXPECT_GT(err[1] / err[2], 3.0);
}

TEST(Energy, ZeroForConstantsAndH1OnAnnulus) {
    const Mesh m = triangulate(preset::annulus(), 0.1);
    const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m);
    EXPECT_LT(sys.energy(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m.nodes.size()), 3.0)), 1e-12);
    EXPECT_LT(field_energy(sys, solve_hi(sys, 1)), 1e-12);
}

TEST(Flux, ManufacturedLogRThroughHole) {
    // d(log r)/dnu on r = 1/2 with nu pointing out of the material (towards 0) is -2; flux -2 pi.
    const DomainSpec spec = preset::annulus();
    const Mesh m = triangulate(spec, 0.05);
    EXPECT_NEAR(solve_log_r(m).flux, -2 * kPi, 0.02 * 2 * kPi);
}

TEST(Flux, CrossCheckAgreesOnStadium) {
    const DomainSpec spec = preset::stadium(3.0);
    const Mesh m = triangulate(spec, 0.08);
    const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m);
    const BoundaryData bd = tangential_boundary_data(spec, m, 1.0);
    const FluxResult J = compute_J(sys, solve_hg(sys, bd), bd, {solve_hi(sys, 1), solve_hi(sys, 2)});
    EXPECT_LT((J.J - J.J_cross).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Solver, ReportsNonConvergence) {
    const Mesh m = triangulate(preset::stadium(2.0), 0.05);
    SolverSettings tight;
    tight.cap_factor = 0.001;  // at most 10 iterations
    const LaplaceSystem sys = LaplaceSystem::holes_dirichlet(m, tight);
    EXPECT_THROW(solve_hi(sys, 1), NumericalFailure);
}

TEST(FieldCsv, Format) {
    const Mesh m = triangulate(preset::annulus(), 0.3);
    const std::string csv = field_csv(m, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.nodes.size())));
    EXPECT_EQ(csv.rfind("node_index,x,y,value\n1,", 0), 0u);
}
