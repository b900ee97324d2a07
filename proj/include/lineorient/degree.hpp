/**
 * @file degree.hpp
 * @brief Winding numbers of sampled circle-valued loops and the boundary
 *        parity test for line fields.
 */
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "lineorient/errors.hpp"
#include "lineorient/tensor.hpp"

namespace lineorient {

/// Cyclic sequence of unit complex samples; the last sample connects back to the first.
using CircleLoop = std::vector<AuxValue>;

namespace detail {
inline constexpr double kMaxGap = std::numbers::pi - 1e-9;
inline constexpr double kIntegerTolerance = 1e-6;

/// Signed angle from a to b in (-pi, pi], computed from b * conj(a).
inline double relative_angle(const AuxValue& a, const AuxValue& b) {
    const double re = b.re * a.re + b.im * a.im;
    const double im = b.im * a.re - b.re * a.im;
    return std::atan2(im, re);
}
}  // namespace detail

/// Sum of the signed angular increments around the loop, divided by 2 pi.
inline int winding_number(std::span<const AuxValue> loop) {
    if (loop.empty()) return 0;
    double total = 0.0;
    const std::size_t m = loop.size();
    for (std::size_t k = 0; k < m; ++k) {
        const double inc = detail::relative_angle(loop[k], loop[(k + 1) % m]);
        if (std::abs(inc) >= detail::kMaxGap) throw GapTooLarge(k, std::abs(inc));
        total += inc;
    }
    const double turns = total / (2.0 * std::numbers::pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > detail::kIntegerTolerance) {
        throw NonInteger("winding sum " + std::to_string(turns) + " is not an integer");
    }
    return static_cast<int>(rounded);
}

inline int winding_number(std::span<const Director2> loop) {
    std::vector<AuxValue> v;
    v.reserve(loop.size());
    for (const auto& n : loop) v.push_back({n.n1, n.n2});
    return winding_number(std::span<const AuxValue>(v));
}

struct BoundaryOrientability {
    bool orientable = true;
    int degree = 0;  ///< winding number of A(Q) along the loop
};

/// A closed line-field loop is orientable iff the winding of A(Q) is even; an
/// orientation then winds deg/2 times.
inline BoundaryOrientability boundary_orientable(std::span<const QTensor2> loop) {
    std::vector<AuxValue> a;
    a.reserve(loop.size());
    for (const auto& q : loop) a.push_back(aux(q));
    const int deg = winding_number(std::span<const AuxValue>(a));
    return {deg % 2 == 0, deg};
}

/// Outer degree plus the hole degrees of one field, all loops traversed with
/// the material on the left; zero for any globally defined circle-valued map.
inline int degree_sum(int outer_deg, std::span<const int> hole_degs) {
    return std::accumulate(hole_degs.begin(), hole_degs.end(), outer_deg);
}

}  // namespace lineorient
