// Least-squares fit of one attribute matrix under the "2+1" model
//
//     a3 ~ [a1 a2] * theta + phi,   theta in R^2, phi in R^3
//
// theta is the least-squares coefficient vector over the three rows and phi
// absorbs whatever the linear part leaves, so the reconstruction is exact.
// The 2x2 normal matrix is inverted directly when it has full rank and is
// replaced by its Moore-Penrose pseudo-inverse otherwise (Constant matrices
// always land there because a1 == a2).
#pragma once

#include <array>
#include <cmath>
#include <string>

#include "rpm/core.hpp"

namespace rpm {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

struct LinearFit {
    Vec2 theta{};
    Vec3 phi{};
    int rank = 0;           // 2, or 1 for any deficient design (the zero matrix included)
    double residual = 0.0;  // max |a3 - ([a1 a2] theta + phi)|
};

namespace detail {

inline double dot(const Vec3& x, const Vec3& y) noexcept {
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
}

// Relative cut below which an eigenvalue of the normal matrix counts as zero.
inline constexpr double kRankTolerance = 1e-12;

}  // namespace detail

inline LinearFit least_squares_induce(const Vec3& a1, const Vec3& a2, const Vec3& a3) {
    for (const Vec3* v : {&a1, &a2, &a3}) {
        for (double x : *v) {
            if (!std::isfinite(x)) throw ContractViolation("least_squares_induce: non-finite input");
        }
    }
    using detail::dot;
    const double n11 = dot(a1, a1), n12 = dot(a1, a2), n22 = dot(a2, a2);
    const double b1 = dot(a1, a3), b2 = dot(a2, a3);

    const double trace = n11 + n22;
    const double det = n11 * n22 - n12 * n12;
    const double gap = std::sqrt((n11 - n22) * (n11 - n22) + 4.0 * n12 * n12);
    const double lambda_max = 0.5 * (trace + gap);

    LinearFit fit;
    if (lambda_max <= 0.0) {
        // a1 = a2 = 0: every theta fits equally well and phi = a3 regardless.
        // Take the limit of the Constant family along a1 = a2 = a3 -> 0.
        fit.rank = 1;
        fit.theta = {0.5, 0.5};
    } else if (det > detail::kRankTolerance * trace * trace) {
        fit.rank = 2;
        fit.theta = {(n22 * b1 - n12 * b2) / det, (n11 * b2 - n12 * b1) / det};
    } else {
        // Rank one: N = lambda e e^T, so N^+ b = (e.b / lambda) e.
        fit.rank = 1;
        double e1, e2;
        if (n12 == 0.0) {
            e1 = n11 >= n22 ? 1.0 : 0.0;
            e2 = 1.0 - e1;
        } else if (n11 >= n22) {
            e1 = lambda_max - n22;
            e2 = n12;
        } else {
            e1 = n12;
            e2 = lambda_max - n11;
        }
        const double norm = std::hypot(e1, e2);
        e1 /= norm;
        e2 /= norm;
        const double scale = (e1 * b1 + e2 * b2) / lambda_max;
        fit.theta = {scale * e1, scale * e2};
    }

    for (std::size_t i = 0; i < 3; ++i) {
        fit.phi[i] = a3[i] - (a1[i] * fit.theta[0] + a2[i] * fit.theta[1]);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const double rebuilt = a1[i] * fit.theta[0] + a2[i] * fit.theta[1] + fit.phi[i];
        fit.residual = std::max(fit.residual, std::abs(a3[i] - rebuilt));
    }
    return fit;
}

}  // namespace rpm
