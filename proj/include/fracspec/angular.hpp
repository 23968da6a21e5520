#pragma once

/// @file angular.hpp
/// Angularly integrated Riesz kernels for the disk:
///   K_l(r, rho) = int_0^{2 pi} cos(l theta) (r^2 + rho^2 - 2 r rho cos theta)^{-1-s} dtheta.
/// The gap d = r - rho is passed separately so near-diagonal values never suffer
/// from cancellation in r^2 + rho^2 - 2 r rho.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "fracspec/error.hpp"
#include "fracspec/kernelmath.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

/// Gauss points per angular panel.
inline constexpr int kAngularPoints = 12;
/// Highest mode served by the precomputed angular tables.
inline constexpr int kMaxMode = 32;

namespace detail {

/// Fixed angular panels on [0, pi]: a top region [pi/4, pi] in three pieces, geometric
/// panels [pi 4^{-k-1}, pi 4^{-k}] for k >= 1, and a first panel [0, pi 4^{-K}].
/// Per node: weight, sin^2(theta/2), cos(l theta) and 2 sin^2(l theta/2) for l <= kMaxMode.
struct AngularTable {
    static constexpr int kLevels = 48;
    std::vector<double> top, geo[kLevels + 1], first[kLevels + 1];

    static void push_panel(std::vector<double>& out, double a, double b) {
        const Rule& gl = gauss_legendre(kAngularPoints);
        for (std::size_t i = 0; i < gl.size(); ++i) {
            const double th = a + (b - a) * gl.nodes[i];
            const double sh = std::sin(0.5 * th);
            out.push_back(2.0 * (b - a) * gl.weights[i]);
            out.push_back(sh * sh);
            for (int l = 0; l <= kMaxMode; ++l) out.push_back(std::cos(l * th));
            for (int l = 0; l <= kMaxMode; ++l) {
                const double sl = std::sin(0.5 * l * th);
                out.push_back(2.0 * sl * sl);
            }
        }
    }
    AngularTable() {
        const double pi = std::numbers::pi;
        for (int j = 0; j < 3; ++j) push_panel(top, pi / 4 + 0.25 * pi * j, pi / 4 + 0.25 * pi * (j + 1));
        for (int k = 1; k <= kLevels; ++k) {
            push_panel(geo[k], pi * std::pow(4.0, -k - 1), pi * std::pow(4.0, -k));
            push_panel(first[k], 0.0, pi * std::pow(4.0, -k));
        }
    }
    static constexpr std::size_t node_size() { return 2 + 2 * (kMaxMode + 1); }
};

inline const AngularTable& angular_table() {
    static const AngularTable table;
    return table;
}

}  // namespace detail

/// Evaluate all modes 0..lmax at once.
///   kernel[l]  = K_l(r, rho)
///   deficit[l] = K_0 - K_l, computed directly as int (1 - cos l theta) k dtheta.
/// d must equal r - rho (sign irrelevant). Requires (r, rho) != (0, 0) and d != 0
/// unless one radius vanishes.
inline void mode_kernels(double r, double rho, double d, double s, int lmax,
                         std::span<double> kernel, std::span<double> deficit) {
    if (lmax > kMaxMode) throw DomainError("mode_kernels: mode above the supported maximum");
    const double ex = -1.0 - s;
    const double rr = r * rho;
    for (int l = 0; l <= lmax; ++l) kernel[l] = deficit[l] = 0.0;
    if (rr == 0.0) {
        const double m = std::max(std::abs(r), std::abs(rho));
        if (m == 0.0) throw DomainError("mode_kernels: both radii vanish");
        kernel[0] = 2.0 * std::numbers::pi * std::pow(m * m, ex);
        for (int l = 1; l <= lmax; ++l) deficit[l] = kernel[0];
        return;
    }
    if (d == 0.0) throw DomainError("mode_kernels: diagonal r = rho is not evaluated pointwise");
    const double d2 = d * d;
    const double rr4 = 4.0 * rr;
    const double delta = std::abs(d) / std::sqrt(rr);
    const auto& tab = detail::angular_table();
    constexpr std::size_t ns = detail::AngularTable::node_size();
    constexpr int L1 = kMaxMode + 1;

    auto run = [&](const std::vector<double>& nodes) {
        for (std::size_t p = 0; p < nodes.size(); p += ns) {
            const double* nd = nodes.data() + p;
            const double w = nd[0] * std::pow(d2 + rr4 * nd[1], ex);
            kernel[0] += w;
            for (int l = 1; l <= lmax; ++l) {
                kernel[l] += w * nd[2 + l];
                deficit[l] += w * nd[2 + L1 + l];
            }
        }
    };
    // first panel [0, pi 4^{-K}] no wider than delta
    int K = 1;
    double edge = std::numbers::pi / 4.0;
    while (edge > delta && K < detail::AngularTable::kLevels) {
        edge *= 0.25;
        ++K;
    }
    run(tab.top);
    for (int k = 1; k < K; ++k) run(tab.geo[k]);
    run(tab.first[K]);
}

/// Single-mode convenience evaluator. r = rho is rejected.
inline double mode_kernel_eval(double r, double rho, int l, FracOrder s) {
    if (r < 0.0 || rho < 0.0) throw DomainError("mode_kernel_eval: radii must be nonnegative");
    if (l < 0) throw DomainError("mode_kernel_eval: mode must be nonnegative");
    if (r == rho) throw DomainError("mode_kernel_eval: r = rho requires the singular pair rule");
    std::vector<double> k(l + 1), dfc(l + 1);
    mode_kernels(r, rho, r - rho, s.value(), l, k, dfc);
    return k[l];
}

/// Coefficient C(s) with K_l(r, rho) ~ C(s) (r rho)^{-1/2} |r - rho|^{-1-2s} as rho -> r.
inline double mode_kernel_diag_coeff(FracOrder s) {
    return std::sqrt(std::numbers::pi) * gamma_fn(s.value() + 0.5) / gamma_fn(s.value() + 1.0);
}

}  // namespace fracspec
