#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lineorient/analysis.hpp"
#include "lineorient/lifting.hpp"

using namespace lineorient;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd two_hole_D(double a) {
    Eigen::MatrixXd D(2, 2);
    D << a, -a, -a, a;
    return D;
}

DegreeClass cls(std::initializer_list<int> v) {
    DegreeClass d(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (int x : v) d[i++] = x;
    return d;
}

// Random PSD matrix with nullspace exactly span(e).
Eigen::MatrixXd random_D(int n, std::mt19937& rng) {
    std::normal_distribution<double> N;
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = N(rng);
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    return P * (B * B.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n)) * P;
}

// Dense pseudo-inverse from the eigen-decomposition, dropping the null eigenvalue.
Eigen::MatrixXd pinv_oracle(const Eigen::MatrixXd& D) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(D);
    Eigen::VectorXd inv = eig.eigenvalues();
    for (Eigen::Index i = 0; i < inv.size(); ++i) inv[i] = std::abs(inv[i]) > 1e-10 ? 1.0 / inv[i] : 0.0;
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

struct Brute {
    double best = 1e300, best_even = 1e300, best_odd = 1e300;
};

// Oracle: every class in a box around J.
Brute brute_force(const QuadraticForm& f, int box) {
    const int n = f.size();
    const int target = -f.outer_degree();
    Brute out;
    DegreeClass d(n);
    auto rec = [&](auto&& self, int i, int sum) -> void {
        if (i == n - 1) {
            d[i] = target - sum;
            if (std::abs(d[i] - f.J()[i]) > box) return;
            const double q = f.value(d);
            out.best = std::min(out.best, q);
            (is_even_class(d) ? out.best_even : out.best_odd) = std::min(is_even_class(d) ? out.best_even : out.best_odd, q);
            return;
        }
        const int c = static_cast<int>(std::round(f.J()[i]));
        for (int v = c - box; v <= c + box; ++v) {
            d[i] = v;
            self(self, i + 1, sum + v);
        }
    };
    rec(rec, 0, 0);
    return out;
}

}  // namespace

TEST(QuadraticForm, TwoHoleClosedForm) {
    const double a = 0.37;
    Eigen::Vector2d J(-1, -1);
    const QuadraticForm f(two_hole_D(a), J, 2);
    EXPECT_NEAR(f.value(cls({-1, -1})), 0.0, 1e-14);
    EXPECT_LT(f.solve_c(cls({-1, -1})).norm(), 1e-14);
    EXPECT_NEAR(f.value(cls({0, -2})), 1.0 / a, 1e-12);
    EXPECT_NEAR(f.value(cls({-2, 0})), 1.0 / a, 1e-12);
    // q(d) = (1/a)(d1 - J1)^2 for arbitrary J on the hyperplane.
    Eigen::Vector2d J2(-0.3, -1.7);
    const QuadraticForm g(two_hole_D(a), J2, 2);
    for (int d1 = -4; d1 <= 4; ++d1) EXPECT_NEAR(g.value(cls({d1, -2 - d1})), (d1 + 0.3) * (d1 + 0.3) / a, 1e-11);
    EXPECT_THROW(g.value(cls({0, 0})), DataError);
    EXPECT_THROW(g.value(cls({0, -2, 0})), DomainError);
}

TEST(QuadraticForm, IntegerJGivesZero) {
    std::mt19937 rng(41);
    const Eigen::MatrixXd D = random_D(3, rng);
    const Eigen::Vector3d J(1, -2, -1);
    const QuadraticForm f(D, J, 2);
    EXPECT_LT(f.solve_c(cls({1, -2, -1})).norm(), 1e-12);
    EXPECT_NEAR(f.value(cls({1, -2, -1})), 0.0, 1e-14);
}

TEST(QuadraticForm, PseudoInverseOracle) {
    std::mt19937 rng(43);
    std::normal_distribution<double> N;
    for (int n = 2; n <= 5; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::MatrixXd D = random_D(n, rng);
            Eigen::VectorXd J(n);
            for (int i = 0; i < n; ++i) J[i] = N(rng);
            J.array() -= (J.sum() + 2) / n;
            const QuadraticForm f(D, J, 2);
            const Eigen::MatrixXd Dp = pinv_oracle(D);
            EXPECT_LT((f.pseudo_inverse() - Dp).norm(), 1e-9 * std::max(1.0, Dp.norm()));
            for (int k = 0; k < 10; ++k) {
                DegreeClass d(n);
                int sum = 0;
                for (int i = 0; i < n - 1; ++i) sum += d[i] = static_cast<int>(std::round(2 * N(rng)));
                d[n - 1] = -2 - sum;
                const Eigen::VectorXd r = d.cast<double>() - J;
                EXPECT_NEAR(f.value(d), r.dot(Dp * r), 1e-9 * std::max(1.0, r.dot(Dp * r)));
            }
        }
    }
}

TEST(QuadraticForm, GaugeInvariance) {
    std::mt19937 rng(47);
    const Eigen::MatrixXd D = random_D(3, rng);
    const Eigen::Vector3d J(-0.4, -0.9, -0.7);
    const QuadraticForm f(D, J, 2);
    for (const auto& d : {cls({0, -1, -1}), cls({1, -2, -1}), cls({-2, 0, 0})}) {
        const Eigen::VectorXd c = f.solve_c(d);
        EXPECT_NEAR(c.sum(), 0.0, 1e-12);
        EXPECT_LT((D * c - (d.cast<double>() - f.J())).norm(), 1e-10);
        for (double t : {-3.0, 1.0, 7.0}) {
            const Eigen::VectorXd shifted = c + t * Eigen::VectorXd::Ones(3);
            EXPECT_NEAR(f.value_of_c(shifted), f.value(d), 1e-12 * std::max(1.0, f.value(d)));
        }
    }
}

TEST(QuadraticForm, RejectsDisconnectedHoles) {
    EXPECT_THROW(QuadraticForm(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(-1, -1), 2), DomainError);
}

TEST(Enumeration, MatchesBruteForce) {
    std::mt19937 rng(53);
    std::normal_distribution<double> N;
    for (int n = 2; n <= 4; ++n) {
        for (int trial = 0; trial < 8; ++trial) {
            const Eigen::MatrixXd D = random_D(n, rng) * (0.2 + trial * 0.1);
            Eigen::VectorXd J(n);
            for (int i = 0; i < n; ++i) J[i] = 1.5 * N(rng);
            const QuadraticForm f(D, J, 2);
            const auto rep = enumerate_and_minimize(f);
            const Brute b = brute_force(f, 7);
            ASSERT_TRUE(rep.best && rep.best_even && rep.best_odd);
            EXPECT_NEAR(rep.best->q, b.best, 1e-10);
            EXPECT_NEAR(rep.best_even->q, b.best_even, 1e-10);
            EXPECT_NEAR(rep.best_odd->q, b.best_odd, 1e-10);
            for (const auto& c : rep.classes) EXPECT_EQ(c.d.sum(), -2);
            const Verdict expect = b.best_odd < b.best_even ? Verdict::AllMinimizersNonOrientable
                                                           : Verdict::AllMinimizersOrientable;
            if (std::abs(b.best_odd - b.best_even) > 1e-6) EXPECT_EQ(rep.verdict, expect);
        }
    }
}

TEST(Enumeration, StadiumPattern) {
    const double a = 0.11;
    const QuadraticForm f(two_hole_D(a), Eigen::Vector2d(-1, -1), 2);
    const auto rep = enumerate_and_minimize(f);
    EXPECT_EQ(rep.verdict, Verdict::AllMinimizersNonOrientable);
    EXPECT_EQ(rep.best->d, cls({-1, -1}));
    EXPECT_NEAR(rep.best_even->q, 1.0 / a, 1e-10);
    EXPECT_TRUE(rep.best_even->d == cls({0, -2}) || rep.best_even->d == cls({-2, 0}));
}

TEST(Enumeration, TieHandling) {
    const QuadraticForm f(two_hole_D(0.2), Eigen::Vector2d(-0.5, -1.5), 2);
    CriterionOptions user;
    user.tie_tol = 0.02;
    EXPECT_EQ(enumerate_and_minimize(f, user).verdict, Verdict::BothKindsExist);
    CriterionOptions derived;
    derived.flux_error = 1e-3;
    EXPECT_EQ(enumerate_and_minimize(f, derived).verdict, Verdict::NumericallyIndeterminate);
    const QuadraticForm g(two_hole_D(0.2), Eigen::Vector2d(-0.45, -1.55), 2);
    EXPECT_EQ(enumerate_and_minimize(g, user).verdict, Verdict::AllMinimizersOrientable);
    const QuadraticForm h(two_hole_D(0.2), Eigen::Vector2d(-0.55, -1.45), 2);
    EXPECT_EQ(enumerate_and_minimize(h, user).verdict, Verdict::AllMinimizersNonOrientable);
}

TEST(Enumeration, AgreesWithTwoHoleVerdict) {
    for (double J1 = -3.0; J1 <= 3.0; J1 += 0.0625) {
        const Eigen::Vector2d J(J1, -2 - J1);
        const auto rep = enumerate_and_minimize(QuadraticForm(two_hole_D(0.3), J, 2), CriterionOptions{0.01});
        EXPECT_EQ(rep.verdict, two_hole_verdict(J1, 0.01)) << "J1 = " << J1;
    }
}

TEST(TwoHoleVerdict, Examples) {
    EXPECT_EQ(two_hole_verdict(-1.0), Verdict::AllMinimizersNonOrientable);
    EXPECT_EQ(two_hole_verdict(-0.1), Verdict::AllMinimizersOrientable);
    EXPECT_EQ(two_hole_verdict(-0.5), Verdict::BothKindsExist);
    EXPECT_EQ(two_hole_verdict(-0.49, 0.02), Verdict::BothKindsExist);
    EXPECT_EQ(two_hole_verdict(1.9), Verdict::AllMinimizersOrientable);
}

TEST(Enumeration, DegenerateCases) {
    const QuadraticForm none(Eigen::MatrixXd(0, 0), Eigen::VectorXd(0), 2);
    const auto rep = enumerate_and_minimize(none);
    EXPECT_TRUE(rep.simply_connected);
    EXPECT_EQ(rep.verdict, Verdict::AllMinimizersOrientable);
    // One hole: the class is forced to -deg.
    const QuadraticForm one(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Constant(1, -2.0), 2);
    const auto r1 = enumerate_and_minimize(one);
    ASSERT_TRUE(r1.best);
    EXPECT_EQ(r1.best->d[0], -2);
    EXPECT_EQ(r1.verdict, Verdict::AllMinimizersOrientable);
    const QuadraticForm odd(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Constant(1, -1.0), 1);
    EXPECT_EQ(enumerate_and_minimize(odd).verdict, Verdict::AllMinimizersNonOrientable);
}

TEST(QEnergy, ConstantData) { EXPECT_EQ(q_energy(0.0, 0.0, 0.7), 0.0); }

TEST(Reconstruction, StadiumWindingsAndEnergy) {
    AnalysisConfig cfg;
    cfg.preset = "stadium";
    cfg.param = 2.0;
    cfg.h = 0.05;
    const Analysis a = analyze(cfg);
    const auto in = a.reconstruction_inputs();
    const MinimizerField m = reconstruct_minimizer(in, cls({-1, -1}), 1.0);
    EXPECT_EQ(m.hole_winding, (std::vector<int>{-1, -1}));
    EXPECT_NEAR(m.energy_m, m.energy_phi, 0.02 * m.energy_phi);
    EXPECT_NEAR(q_energy(a.form->value(cls({-1, -1})), a.ctx.hg_energy, 1.0), 0.5 * m.energy_m, 0.02 * 0.5 * m.energy_m);
    const MinimizerField e = reconstruct_minimizer(in, cls({0, -2}), 1.0);
    EXPECT_EQ(e.hole_winding, (std::vector<int>{0, -2}));
    const double gap = 0.5 * (e.energy_m - m.energy_m);
    EXPECT_NEAR(gap, 0.5 * 2 * kPi / a.report.D(0, 0), 0.05 * gap);
    // Orientability of the reconstructed field follows the parity of the class.
    EXPECT_FALSE(lift_field(*a.mesh, m.q).orientable);
    EXPECT_TRUE(lift_field(*a.mesh, e.q).orientable);
    // Outer boundary matches the data.
    for (std::size_t k = 0; k < a.bd.nodes.size(); ++k) {
        EXPECT_LT(std::abs(m.m[a.bd.nodes[k]].complex() - a.bd.a[k].complex()), 0.05);
    }
}

TEST(Reconstruction, AnnulusIsTheSquareOfTheTangent) {
    // Closed form: m = exp(2 i (phi + pi/2)) everywhere; nodal error shrinks with h.
    std::vector<double> worst;
    for (double h : {0.05, 0.025}) {
        AnalysisConfig cfg;
        cfg.preset = "annulus";
        cfg.h = h;
        const Analysis a = analyze(cfg);
        const MinimizerField m = reconstruct_minimizer(a.reconstruction_inputs(), cls({-2}), 0.5);
        EXPECT_EQ(m.hole_winding, (std::vector<int>{-2}));
        EXPECT_TRUE(lift_field(*a.mesh, m.q).orientable);
        double w = 0.0;
        for (std::size_t v = 0; v < a.mesh->nodes.size(); ++v) {
            const Vec2 p = a.mesh->nodes[v];
            const std::complex<double> exact = std::polar(1.0, 2 * std::atan2(p.y, p.x) + kPi);
            w = std::max(w, std::abs(m.m[v].complex() - exact));
        }
        worst.push_back(w);
    }
    EXPECT_LT(worst[0], 5e-3);
    EXPECT_LT(worst[1], worst[0] / 2);
}

TEST(Reconstruction, ThreeHoleWindingsExact) {
    AnalysisConfig cfg;
    cfg.preset = "three_hole_disk";
    cfg.h = 0.1;
    const Analysis a = analyze(cfg);
    const auto in = a.reconstruction_inputs();
    int tested = 0;
    for (int d1 = -3; d1 <= 3; ++d1) {
        for (int d2 = -3; d2 <= 3; ++d2) {
            const int d3 = -2 - d1 - d2;
            if (std::abs(d3) > 3) continue;
            const DegreeClass d = cls({d1, d2, d3});
            const MinimizerField m = reconstruct_minimizer(in, d, 1.0);
            EXPECT_EQ(m.hole_winding, (std::vector<int>{d1, d2, d3}));
            EXPECT_EQ(lift_field(*a.mesh, m.q).orientable, is_even_class(d));
            EXPECT_NEAR(m.energy_phi, 2 * kPi * a.form->value(d) + a.ctx.hg_energy, 1e-6 * m.energy_phi);
            ++tested;
        }
    }
    EXPECT_GE(tested, 10);
}

TEST(Reports, CsvHeaders) {
    AnalysisConfig cfg;
    cfg.preset = "stadium";
    cfg.h = 0.1;
    const Analysis a = analyze(cfg);
    const std::string csv = report_csv(a.report, a.ctx);
    EXPECT_EQ(csv.rfind("d_1,d_2,q,even,energy\n", 0), 0u);
    const std::string txt = report_text(a.report, a.ctx);
    EXPECT_NE(txt.find("verdict = AllMinimizersNonOrientable"), std::string::npos);
    const MinimizerField m = reconstruct_minimizer(a.reconstruction_inputs(), a.report.best->d, 1.0);
    EXPECT_EQ(minimizer_csv(*a.mesh, m).rfind("node_index,x,y,psi,m1,m2,q11,q12\n1,", 0), 0u);
}
