/**
 * @file tensor.hpp
 * @brief Uniaxial Q-tensors with fixed scalar order parameter, their planar
 *        restriction, and the auxiliary circle-valued map.
 *
 * A director n and its negative describe the same line. The projection
 * P(n) = s (n (x) n - Id/3) forgets the orientation; the planar auxiliary map
 * A(Q) = (2/s) Q11 - 1/3 + i (2/s) Q12 equals (n1 + i n2)^2 and is a bijection
 * between planar line fields and the unit circle.
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "lineorient/errors.hpp"

namespace lineorient {

/// Scalar order parameter s, nonzero and in [-1/2, 1].
class OrderParameter {
public:
    explicit OrderParameter(double s) : s_(s) {
        if (!(s != 0.0 && s >= -0.5 && s <= 1.0)) {
            throw DomainError("order parameter s must be nonzero and in [-1/2, 1], got " +
                              std::to_string(s));
        }
    }
    double value() const { return s_; }
    operator double() const { return s_; }

private:
    double s_;
};

struct Director3 {
    double n1 = 0.0, n2 = 0.0, n3 = 1.0;

    double norm() const { return std::sqrt(n1 * n1 + n2 * n2 + n3 * n3); }
    Director3 operator-() const { return {-n1, -n2, -n3}; }
    double dot(const Director3& o) const { return n1 * o.n1 + n2 * o.n2 + n3 * o.n3; }

    static Director3 normalized(double x, double y, double z) {
        const double r = std::sqrt(x * x + y * y + z * z);
        if (r == 0.0) throw InvalidDirector("cannot normalize the zero vector");
        return {x / r, y / r, z / r};
    }
};

/// Planar director (n1, n2, 0).
struct Director2 {
    double n1 = 1.0, n2 = 0.0;

    double norm() const { return std::hypot(n1, n2); }
    double angle() const { return std::atan2(n2, n1); }
    Director2 operator-() const { return {-n1, -n2}; }
    double dot(const Director2& o) const { return n1 * o.n1 + n2 * o.n2; }

    static Director2 from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }
    static Director2 normalized(double x, double y) {
        const double r = std::hypot(x, y);
        if (r == 0.0) throw InvalidDirector("cannot normalize the zero vector");
        return {x / r, y / r};
    }
};

/// Symmetric traceless 3x3 tensor stored by its five independent entries.
struct QTensor3 {
    double q11 = 0.0, q22 = 0.0, q12 = 0.0, q13 = 0.0, q23 = 0.0;

    double q33() const { return -q11 - q22; }

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d m;
        m << q11, q12, q13,  //
            q12, q22, q23,   //
            q13, q23, q33();
        return m;
    }
};

inline double frobenius_distance(const QTensor3& a, const QTensor3& b) {
    return (a.matrix() - b.matrix()).norm();
}

/// Point on the unit circle, read as a complex number re + i im.
struct AuxValue {
    double re = 1.0, im = 0.0;

    double angle() const { return std::atan2(im, re); }
    double modulus() const { return std::hypot(re, im); }
    std::complex<double> complex() const { return {re, im}; }

    static AuxValue from_angle(double alpha) { return {std::cos(alpha), std::sin(alpha)}; }
    static AuxValue from_complex(std::complex<double> z) { return {z.real(), z.imag()}; }
};

/**
 * Planar member of the constrained tensor set: Q = s (n (x) n - Id/3) with
 * n = (n1, n2, 0). Only (q11, q12) are stored; q22 = s/3 - q11, q33 = -s/3,
 * q13 = q23 = 0.
 */
struct QTensor2 {
    double q11 = 0.0, q12 = 0.0;
    double s = 1.0;

    double q22() const { return s / 3.0 - q11; }
    double q33() const { return -s / 3.0; }

    QTensor3 full() const { return {q11, q22(), q12, 0.0, 0.0}; }
};

/// Frobenius norm of the 3x3 difference; q33 cancels for equal s.
inline double frobenius_distance(const QTensor2& a, const QTensor2& b) {
    return frobenius_distance(a.full(), b.full());
}

namespace detail {
inline constexpr double kDirectorTolerance = 1e-6;
inline constexpr double kAuxTolerance = 1e-6;
}  // namespace detail

inline QTensor3 project(const Director3& n, const OrderParameter& s) {
    if (std::abs(n.norm() - 1.0) > detail::kDirectorTolerance) {
        throw InvalidDirector("director is not a unit vector (norm " + std::to_string(n.norm()) + ")");
    }
    const double sv = s.value();
    return {sv * (n.n1 * n.n1 - 1.0 / 3.0), sv * (n.n2 * n.n2 - 1.0 / 3.0), sv * n.n1 * n.n2,
            sv * n.n1 * n.n3, sv * n.n2 * n.n3};
}

inline QTensor2 project(const Director2& n, const OrderParameter& s) {
    if (std::abs(n.norm() - 1.0) > detail::kDirectorTolerance) {
        throw InvalidDirector("director is not a unit vector (norm " + std::to_string(n.norm()) + ")");
    }
    const double sv = s.value();
    return {sv * (n.n1 * n.n1 - 1.0 / 3.0), sv * n.n1 * n.n2, sv};
}

/**
 * Membership test for the uniaxial set with order parameter s, via the
 * invariants det Q = 2 s^3 / 27 and tr Q^2 = 2 s^2 / 3 (eigenvalues
 * -s/3, -s/3, 2s/3).
 */
inline bool is_uniaxial(const QTensor3& q, const OrderParameter& s, double tol = 1e-9) {
    const Eigen::Matrix3d m = q.matrix();
    const double sv = s.value();
    const double det_residual = m.determinant() - 2.0 * sv * sv * sv / 27.0;
    const double tr2_residual = (m * m).trace() - 2.0 * sv * sv / 3.0;
    return std::abs(det_residual) <= tol && std::abs(tr2_residual) <= tol;
}

namespace detail {
template <std::size_t N>
void canonicalize_sign(std::array<double, N>& v) {
    for (double c : v) {
        if (std::abs(c) > 1e-9) {
            if (c < 0.0) {
                for (double& x : v) x = -x;
            }
            return;
        }
    }
}
}  // namespace detail

/// Unit eigenvector for the simple eigenvalue 2s/3, with the first
/// significant component made positive.
inline Director3 extract_director(const QTensor3& q, const OrderParameter& s, double tol = 1e-9) {
    if (!is_uniaxial(q, s, tol)) {
        throw DomainError("tensor is not uniaxial with the given order parameter");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(q.matrix());
    // Eigenvalues are sorted ascending; 2s/3 is the largest for s > 0 and the smallest for s < 0.
    const Eigen::Vector3d v = s.value() > 0.0 ? eig.eigenvectors().col(2) : eig.eigenvectors().col(0);
    std::array<double, 3> c{v(0), v(1), v(2)};
    detail::canonicalize_sign(c);
    return Director3::normalized(c[0], c[1], c[2]);
}

inline AuxValue aux(const QTensor2& q) {
    return {2.0 / q.s * q.q11 - 1.0 / 3.0, 2.0 / q.s * q.q12};
}

inline QTensor2 aux_inverse(const AuxValue& a, const OrderParameter& s) {
    if (std::abs(a.modulus() - 1.0) > detail::kAuxTolerance) {
        throw InvalidAux("auxiliary value is off the unit circle (modulus " +
                         std::to_string(a.modulus()) + ")");
    }
    const double sv = s.value();
    return {0.5 * sv * a.re + sv / 6.0, 0.5 * sv * a.im, sv};
}

/// Canonical planar director of a planar tensor: half the angle of A(Q).
inline Director2 director(const QTensor2& q) {
    const double theta = 0.5 * aux(q).angle();
    std::array<double, 2> c{std::cos(theta), std::sin(theta)};
    detail::canonicalize_sign(c);
    return {c[0], c[1]};
}

/// Oseen-Frank and Landau-de Gennes elastic constants of one material at fixed s.
struct ElasticConstants {
    std::array<double, 4> K{};  ///< Oseen-Frank K1..K4
    std::array<double, 4> L{};  ///< Landau-de Gennes L1..L4
    double s = 1.0;

    static ElasticConstants from_landau(const std::array<double, 4>& L, double s);
    static ElasticConstants from_oseen_frank(const std::array<double, 4>& K, double s);
};

inline ElasticConstants constants_K_from_L(const ElasticConstants& c, double s) {
    if (s == 0.0) throw DomainError("elastic constant conversion requires s != 0");
    const auto& L = c.L;
    const double s2 = s * s, s3 = s2 * s;
    ElasticConstants out;
    out.L = L;
    out.s = s;
    out.K[0] = L[0] * s2 + L[1] * s2 + 2.0 * L[2] * s2 - 2.0 / 3.0 * L[3] * s3;
    out.K[1] = 2.0 * L[2] * s2 - 2.0 / 3.0 * L[3] * s3;
    out.K[2] = L[0] * s2 + L[1] * s2 + 2.0 * L[2] * s2 + 4.0 / 3.0 * L[3] * s3;
    out.K[3] = L[1] * s2;
    return out;
}

inline ElasticConstants constants_L_from_K(const ElasticConstants& c, double s) {
    if (s == 0.0) throw DomainError("elastic constant conversion requires s != 0");
    const auto& K = c.K;
    const double s2 = s * s, s3 = s2 * s;
    ElasticConstants out;
    out.K = K;
    out.s = s;
    out.L[3] = (K[2] - K[0]) / (2.0 * s3);
    out.L[1] = K[3] / s2;
    out.L[2] = (K[1] + 2.0 / 3.0 * out.L[3] * s3) / (2.0 * s2);
    out.L[0] = (K[0] + 2.0 / 3.0 * out.L[3] * s3) / s2 - out.L[1] - 2.0 * out.L[2];
    return out;
}

inline ElasticConstants ElasticConstants::from_landau(const std::array<double, 4>& L, double s) {
    ElasticConstants c;
    c.L = L;
    return constants_K_from_L(c, s);
}

inline ElasticConstants ElasticConstants::from_oseen_frank(const std::array<double, 4>& K, double s) {
    ElasticConstants c;
    c.K = K;
    return constants_L_from_K(c, s);
}

}  // namespace lineorient
