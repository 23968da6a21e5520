#pragma once

/// @file geometry.hpp
/// Ball, graded radial quadrature grids with a truncated exterior, polar grids,
/// and the analytic bound used to choose the truncation radius.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fracspec/error.hpp"
#include "fracspec/kernelmath.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

struct Ball {
    double R;
    Dimension N;

    Ball(double radius, Dimension dim) : R(radius), N(dim) {
        if (!(radius > 0.0)) throw ConstructionError("Ball: radius must be positive");
    }
    double volume() const { return sphere_measure(N) * std::pow(R, N.value()) / N.value(); }
};

/// Composite Gauss rule over cells of [0, R] and (R, R_inf].
struct RadialGrid {
    double R = 1.0;
    double R_inf = 2.0;
    int points_per_cell = 6;
    std::vector<double> interior_breaks;  ///< 0 = b_0 < ... < b_n = R
    std::vector<double> exterior_breaks;  ///< R = e_0 < ... < e_m = R_inf
    std::vector<double> interior_nodes;
    std::vector<double> interior_weights;
    std::vector<double> exterior_nodes;
    std::vector<double> exterior_weights;

    int interior_cells() const { return static_cast<int>(interior_breaks.size()) - 1; }
    int exterior_cells() const { return static_cast<int>(exterior_breaks.size()) - 1; }
};

namespace detail {

inline void fill_cells(const std::vector<double>& br, int q, std::vector<double>& x,
                       std::vector<double>& w) {
    const Rule& gl = gauss_legendre(q);
    for (std::size_t c = 0; c + 1 < br.size(); ++c) {
        const double h = br[c + 1] - br[c];
        for (std::size_t i = 0; i < gl.size(); ++i) {
            x.push_back(br[c] + h * gl.nodes[i]);
            w.push_back(h * gl.weights[i]);
        }
    }
}

/// Geometric widths h0, h0 q, ..., h0 q^{m-1} summing to len (q >= 1).
inline std::vector<double> geometric_breaks(double start, double len, int m, double h0) {
    std::vector<double> br{start};
    if (h0 * m >= len) {
        for (int k = 1; k <= m; ++k) br.push_back(start + len * k / m);
        return br;
    }
    auto total = [&](double q) {
        return std::abs(q - 1.0) < 1e-14 ? h0 * m : h0 * (std::pow(q, m) - 1.0) / (q - 1.0);
    };
    double lo = 1.0, hi = 2.0;
    while (total(hi) < len) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) < len ? lo : hi) = mid;
    }
    const double q = 0.5 * (lo + hi);
    double x = start, w = h0;
    for (int k = 1; k < m; ++k) {
        x += w;
        br.push_back(x);
        w *= q;
    }
    br.push_back(start + len);
    return br;
}

}  // namespace detail

/// Interior cells b_k = R (1 - (1 - k/n)^grading), so grading > 1 clusters toward R.
/// Exterior cells grow geometrically from the last interior width toward R_inf.
inline RadialGrid make_radial_grid(double R, int n_int, double R_inf, int n_ext, double grading,
                                   int points_per_cell = 6) {
    if (!(R > 0.0)) throw ConstructionError("make_radial_grid: R must be positive");
    if (n_int < 4 || n_ext < 4) throw ConstructionError("make_radial_grid: need at least 4 cells on each side");
    if (!(R_inf > R)) throw ConstructionError("make_radial_grid: R_inf must exceed R");
    if (!(grading >= 1.0)) throw ConstructionError("make_radial_grid: grading must be >= 1");
    if (points_per_cell < 1) throw ConstructionError("make_radial_grid: points_per_cell must be positive");
    RadialGrid g;
    g.R = R;
    g.R_inf = R_inf;
    g.points_per_cell = points_per_cell;
    for (int k = 0; k <= n_int; ++k) {
        g.interior_breaks.push_back(R * (1.0 - std::pow(1.0 - static_cast<double>(k) / n_int, grading)));
    }
    g.interior_breaks.front() = 0.0;
    g.interior_breaks.back() = R;
    const double h_last = R - g.interior_breaks[n_int - 1];
    g.exterior_breaks = detail::geometric_breaks(R, R_inf - R, n_ext, h_last);
    detail::fill_cells(g.interior_breaks, points_per_cell, g.interior_nodes, g.interior_weights);
    detail::fill_cells(g.exterior_breaks, points_per_cell, g.exterior_nodes, g.exterior_weights);
    return g;
}

/// Fraction of the cross term beyond R_inf, relative to |B| ||u||_inf^2 R^{-2s}:
/// 4 |S^{N-1}| R^{2s} int_{R_inf}^inf r^{N-1} (r - R)^{-N-2s} dr.
inline double tail_fraction(FracOrder s, Dimension N, double R, double R_inf) {
    if (!(R_inf > R)) throw DomainError("tail_fraction: R_inf must exceed R");
    const int n = N.value();
    const double T = R_inf - R;
    double acc = 0.0, binom = 1.0;
    for (int j = 0; j <= n - 1; ++j) {
        // (t + R)^{N-1} = sum_j C(N-1, j) R^{N-1-j} t^j
        acc += binom * std::pow(R, n - 1 - j) * std::pow(T, j - n - 2.0 * s + 1.0) /
               (n + 2.0 * s - 1.0 - j);
        binom = binom * (n - 1 - j) / (j + 1);
    }
    return 4.0 * sphere_measure(N) * std::pow(R, 2.0 * s) * acc;
}

/// Smallest R_inf = R (1 + 2^{k/4}), k = 0, 1, ..., with tail_fraction <= tol.
inline double tail_bound(FracOrder s, Dimension N, double R, double tol) {
    if (!(tol > 0.0)) throw DomainError("tail_bound: tol must be positive");
    for (int k = 0; k < 4000; ++k) {
        const double r_inf = R * (1.0 + std::pow(2.0, 0.25 * k));
        if (tail_fraction(s, N, R, r_inf) <= tol) return r_inf;
    }
    throw NumericalError("tail_bound: no truncation radius below 2^1000 R meets the tolerance");
}

/// Radial grid times M uniform angles 2 pi a / M. Values are stored row-major
/// (radial node, angle), interior rows first, then exterior rows.
struct PolarGrid {
    RadialGrid radial;
    int n_angles = 16;

    PolarGrid(RadialGrid rg, int angles) : radial(std::move(rg)), n_angles(angles) {
        if (angles < 8 || angles % 2 != 0) {
            throw ConstructionError("PolarGrid: angle count must be even and at least 8, got " +
                                    std::to_string(angles));
        }
    }
    double angle(int a) const { return 2.0 * std::numbers::pi * a / n_angles; }
    double angle_weight() const { return 2.0 * std::numbers::pi / n_angles; }
    int interior_rings() const { return static_cast<int>(radial.interior_nodes.size()); }
    int exterior_rings() const { return static_cast<int>(radial.exterior_nodes.size()); }
    int rings() const { return interior_rings() + exterior_rings(); }
    std::size_t interior_size() const { return static_cast<std::size_t>(interior_rings()) * n_angles; }
    std::size_t size() const { return static_cast<std::size_t>(rings()) * n_angles; }
    double ring_radius(int i) const {
        return i < interior_rings() ? radial.interior_nodes[i] : radial.exterior_nodes[i - interior_rings()];
    }
    /// Area weight of node (ring i, any angle).
    double area_weight(int i) const {
        const double w = i < interior_rings() ? radial.interior_weights[i]
                                              : radial.exterior_weights[i - interior_rings()];
        return w * ring_radius(i) * angle_weight();
    }
    std::size_t index(int ring, int a) const {
        return static_cast<std::size_t>(ring) * n_angles + static_cast<std::size_t>(a);
    }
};

}  // namespace fracspec
