#pragma once

/// @file full2d.hpp
/// Direct quadrature of the seminorm over R^4 minus (B^c)^2 for a function on the
/// disk and its exterior values. Validation oracle for the mode-reduced assembly:
///   int_B int_B |u(x)-u(y)|^2 k + 2 int_{B^c} int_B |u~(y)-u(x)|^2 k,  k = |x-y|^{-2-2s}.
/// The interior block uses polar coordinates about each outer node x with a
/// Gauss-Jacobi rule absorbing rho^{1-2s}; every inner rule is laid out relative
/// to the outer node's angle, so rotating u rotates the rule.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracspec/error.hpp"
#include "fracspec/extension.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/kernelmath.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

struct Full2dOptions {
    int q_angle = 10;   ///< Gauss points per angular panel around an outer node
    int q_radial = 10;  ///< Gauss points per radial piece along a ray
    int q_jacobi = 16;  ///< Gauss-Jacobi points on the innermost radial piece
};

namespace detail {

/// int_B (u(x) - u(y))^2 |x - y|^{-2-2s} dy for x inside B.
inline double interior_ray_integral(const PolarFunction& u, std::span<const double> kinks, double R, double rx,
                                    double tx, double s, const Full2dOptions& opt, const Rule& gj) {
    const double ux = u(rx, tx);
    const double cx = rx * std::cos(tx), cy = rx * std::sin(tx);
    const double delta = R - rx;
    const Rule& ga = gauss_legendre(opt.q_angle);
    const Rule& gr = gauss_legendre(opt.q_radial);
    const double beta = 1.0 - 2.0 * s;
    // rho_b(alpha) has complex singularities at alpha = pi/2 +- i acosh(R/rx); kinks
    // add tangency angles asin(k/rx)
    const double pi = std::numbers::pi;
    std::vector<double> ab{0.0, pi};
    for (double b : doubling_breaks(std::sqrt(2.0 * delta / R), 0.5 * pi)) {
        ab.push_back(0.5 * pi - b);
        ab.push_back(0.5 * pi + b);
    }
    for (double kr : kinks) {
        if (kr < rx) {
            const double t = std::asin(kr / rx);
            ab.push_back(t);
            ab.push_back(pi - t);
        }
    }
    std::sort(ab.begin(), ab.end());
    {
        std::vector<double> fine{ab.front()};
        for (std::size_t j = 1; j < ab.size(); ++j) {
            const double len = ab[j] - ab[j - 1];
            if (len < 1e-15) continue;
            const int sub = static_cast<int>(std::ceil(len / (pi / 8.0)));
            for (int m = 1; m <= sub; ++m) fine.push_back(ab[j - 1] + len * m / sub);
        }
        ab.swap(fine);
    }
    std::vector<double> cuts;
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < ab.size(); ++j) {
        const double a0 = ab[j], ha = ab[j + 1] - ab[j];
        for (std::size_t k = 0; k < ga.size(); ++k) {
            const double alpha0 = a0 + ha * ga.nodes[k];
            for (int sign = -1; sign <= 1; sign += 2) {
                const double alpha = sign * alpha0;
                const double ca = std::cos(alpha), sa = std::sin(alpha);
                const double rb = -rx * ca + std::sqrt(R * R - rx * rx * sa * sa);
                const double phi = tx + alpha;
                const double ex = std::cos(phi), ey = std::sin(phi);
                cuts.assign({0.0, rb});
                const double closest = -rx * ca;
                if (closest > 0.0 && closest < rb) cuts.push_back(closest);
                for (double kr : kinks) {
                    const double disc = kr * kr - rx * rx * sa * sa;
                    if (disc <= 0.0) continue;
                    for (double root : {-rx * ca - std::sqrt(disc), -rx * ca + std::sqrt(disc)}) {
                        if (root > 1e-14 * R && root < rb * (1.0 - 1e-14)) cuts.push_back(root);
                    }
                }
                std::sort(cuts.begin(), cuts.end());
                auto val = [&](double rho) {
                    const double yx = cx + rho * ex, yy = cy + rho * ey;
                    return u(std::hypot(yx, yy), std::atan2(yy, yx));
                };
                double ray = 0.0;
                // innermost piece: rho^{1-2s} ((u(x) - u(y)) / rho)^2
                const double r1 = cuts[1];
                for (std::size_t i = 0; i < gj.size(); ++i) {
                    const double rho = r1 * gj.nodes[i];
                    const double q = (ux - val(rho)) / rho;
                    ray += gj.weights[i] * q * q;
                }
                ray *= std::pow(r1, beta + 1.0);
                for (std::size_t c = 1; c + 1 < cuts.size(); ++c) {
                    const double lo = cuts[c], hr = cuts[c + 1] - lo;
                    if (hr <= 0.0) continue;
                    for (std::size_t i = 0; i < gr.size(); ++i) {
                        const double rho = lo + hr * gr.nodes[i];
                        const double q = ux - val(rho);
                        ray += hr * gr.weights[i] * q * q * std::pow(rho, -1.0 - 2.0 * s);
                    }
                }
                acc += ha * ga.weights[k] * ray;
            }
        }
    }
    return acc;
}

}  // namespace detail

/// Full seminorm [v]^2 (without c_{2,s}/2). Needs the interior evaluator of v and
/// exterior values at every exterior node.
inline double assemble_full_2d(FracOrder s, const ExtendedFunction& v, const Full2dOptions& opt = {}) {
    const InteriorFunction& u = v.interior;
    const PolarGrid& g = u.grid;
    if (!u.exact) throw ConstructionError("assemble_full_2d: interior evaluator required");
    if (v.exterior.size() != static_cast<std::size_t>(g.exterior_rings()) * g.n_angles) {
        throw ConstructionError("assemble_full_2d: missing exterior values");
    }
    const double R = g.radial.R;
    const double sv = s.value();
    const Rule gj = gauss_jacobi(opt.q_jacobi, 1.0 - 2.0 * sv);
    double inner = 0.0;
    for (int i = 0; i < g.interior_rings(); ++i) {
        const double r = g.ring_radius(i), w = g.area_weight(i);
        for (int a = 0; a < g.n_angles; ++a) {
            inner += w * detail::interior_ray_integral(u.exact, u.kinks, R, r, g.angle(a), sv, opt, gj);
        }
    }
    double cross = 0.0;
    for (int i = 0; i < g.exterior_rings(); ++i) {
        const int ring = g.interior_rings() + i;
        const double r = g.ring_radius(ring), w = g.area_weight(ring);
        for (int a = 0; a < g.n_angles; ++a) {
            const double t = g.angle(a);
            const Point2 y{r * std::cos(t), r * std::sin(t)};
            const double uy = v.node_value(ring, a);
            cross += w * detail::disk_integral_near(R, y, u.kinks, [&](double rr, double tt) {
                const double q = uy - u.exact(rr, tt);
                return q * q * detail::riesz_kernel_2d(y.x - rr * std::cos(tt), y.y - rr * std::sin(tt), sv);
            });
        }
    }
    return inner + 2.0 * cross;
}

}  // namespace fracspec
