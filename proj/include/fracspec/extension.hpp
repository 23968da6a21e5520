#pragma once

/// @file extension.hpp
/// Minimal exterior extension u~(x) = int_B u(y) k(x-y) dy / int_B k(x-y) dy with
/// k(z) = |z|^{-2-2s}, the nonlocal Neumann residual, and the per-mode radial form
///   f~(r) = int K_l(r, rho) f(rho) rho drho / int K_0(r, rho) rho drho.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "fracspec/angular.hpp"
#include "fracspec/basis.hpp"
#include "fracspec/error.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/kernelmath.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    double norm() const { return std::hypot(x, y); }
};

using PolarFunction = std::function<double(double r, double theta)>;

/// Samples of u on the interior nodes of a polar grid, optionally backed by an
/// evaluator that lets reference quadratures go off-grid.
struct InteriorFunction {
    PolarGrid grid;
    std::vector<double> values;  ///< interior_size() entries, row-major (ring, angle)
    double mean = 0.0;           ///< grid quadrature of int_B u dx
    PolarFunction exact;         ///< empty when only samples are known
    std::vector<double> kinks;   ///< radii where exact has derivative jumps

    InteriorFunction(PolarGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.interior_size()) {
            throw ConstructionError("InteriorFunction: sample count does not match grid");
        }
        for (double x : values) {
            if (!std::isfinite(x)) throw ConstructionError("InteriorFunction: non-finite sample");
        }
        mean = 0.0;
        for (int i = 0; i < grid.interior_rings(); ++i) {
            for (int a = 0; a < grid.n_angles; ++a) mean += grid.area_weight(i) * values[grid.index(i, a)];
        }
    }
};

inline InteriorFunction sample_interior(const PolarGrid& g, PolarFunction f, std::vector<double> kinks = {}) {
    std::vector<double> v(g.interior_size());
    for (int i = 0; i < g.interior_rings(); ++i) {
        for (int a = 0; a < g.n_angles; ++a) v[g.index(i, a)] = f(g.ring_radius(i), g.angle(a));
    }
    InteriorFunction u(g, std::move(v));
    u.exact = std::move(f);
    u.kinks = std::move(kinks);
    return u;
}

namespace detail {

inline double riesz_kernel_2d(double dx, double dy, double s) {
    return std::pow(dx * dx + dy * dy, -1.0 - s);
}

inline void require_exterior(const Point2& x, double R, const char* who) {
    if (!(x.norm() > R)) throw DomainError(std::string(who) + ": point must lie strictly outside the ball");
}

/// Split every panel wider than hmax into equal parts.
inline std::vector<double> cap_panels(const std::vector<double>& br, double hmax) {
    std::vector<double> out{br.front()};
    for (std::size_t i = 1; i < br.size(); ++i) {
        const double h = br[i] - br[i - 1];
        const int m = std::max(1, static_cast<int>(std::ceil(h / hmax - 1e-12)));
        for (int k = 1; k < m; ++k) out.push_back(br[i - 1] + h * k / m);
        out.push_back(br[i]);
    }
    return out;
}

/// int_B f(r, theta) dA in polar coordinates about the origin, with panels graded
/// toward the boundary point closest to the exterior point x.
template <class F>
double disk_integral_near(double R, const Point2& x, std::span<const double> kinks, F&& f, int q = 10) {
    const double rx = x.norm();
    const double tx = std::atan2(x.y, x.x);
    const double delta = rx - R;
    std::vector<double> rb;
    for (double u : doubling_breaks(delta, R)) rb.push_back(R - u);
    for (double k : kinks) if (k > 0.0 && k < R) rb.push_back(k);
    std::sort(rb.begin(), rb.end());
    rb.erase(std::unique(rb.begin(), rb.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }), rb.end());
    rb = cap_panels(rb, 0.25 * R);
    const auto ab = cap_panels(doubling_breaks(delta / R, std::numbers::pi), std::numbers::pi / 8.0);
    const Rule& gl = gauss_legendre(q);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < rb.size(); ++i) {
        const double r0 = rb[i], hr = rb[i + 1] - rb[i];
        for (std::size_t p = 0; p < gl.size(); ++p) {
            const double r = r0 + hr * gl.nodes[p];
            const double wr = hr * gl.weights[p] * r;
            double ring = 0.0;
            for (std::size_t j = 0; j + 1 < ab.size(); ++j) {
                const double a0 = ab[j], ha = ab[j + 1] - ab[j];
                for (std::size_t k = 0; k < gl.size(); ++k) {
                    const double a = a0 + ha * gl.nodes[k];
                    ring += ha * gl.weights[k] * (f(r, tx + a) + f(r, tx - a));
                }
            }
            acc += wr * ring;
        }
    }
    return acc;
}

/// int_B k(x - y) dy by the reference rule.
inline double kernel_mass_reference(double R, const Point2& x, double s) {
    return disk_integral_near(R, x, {}, [&](double r, double t) {
        return riesz_kernel_2d(x.x - r * std::cos(t), x.y - r * std::sin(t), s);
    });
}

}  // namespace detail

/// Grid quadrature of the extension formula at an exterior point.
inline double minimal_extension_value(const InteriorFunction& u, const Point2& x, FracOrder s) {
    const PolarGrid& g = u.grid;
    detail::require_exterior(x, g.radial.R, "minimal_extension_value");
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.interior_rings(); ++i) {
        const double r = g.ring_radius(i), w = g.area_weight(i);
        for (int a = 0; a < g.n_angles; ++a) {
            const double t = g.angle(a);
            const double k = w * detail::riesz_kernel_2d(x.x - r * std::cos(t), x.y - r * std::sin(t), s);
            num += k * u.values[g.index(i, a)];
            den += k;
        }
    }
    return num / den;
}

/// u together with exterior values at the exterior polar nodes. Off-grid exterior
/// points are evaluated through `exterior_eval` when set, otherwise by the formula.
struct ExtendedFunction {
    InteriorFunction interior;
    std::vector<double> exterior;  ///< exterior rings x angles, row-major
    std::function<double(const Point2&)> exterior_eval;
    double s = 0.5;

    double at_exterior(const Point2& x) const {
        if (exterior_eval) return exterior_eval(x);
        return minimal_extension_value(interior, x, FracOrder(s));
    }
    /// Value at polar node (ring, angle) over the full grid.
    double node_value(int ring, int a) const {
        const PolarGrid& g = interior.grid;
        if (ring < g.interior_rings()) return interior.values[g.index(ring, a)];
        return exterior[static_cast<std::size_t>(ring - g.interior_rings()) * g.n_angles + a];
    }
};

inline ExtendedFunction extend_minimal(const InteriorFunction& u, FracOrder s) {
    const PolarGrid& g = u.grid;
    ExtendedFunction v{u, {}, {}, s.value()};
    v.exterior.resize(static_cast<std::size_t>(g.exterior_rings()) * g.n_angles);
    for (int i = 0; i < g.exterior_rings(); ++i) {
        const double r = g.radial.exterior_nodes[i];
        for (int a = 0; a < g.n_angles; ++a) {
            const double t = g.angle(a);
            v.exterior[static_cast<std::size_t>(i) * g.n_angles + a] =
                minimal_extension_value(u, {r * std::cos(t), r * std::sin(t)}, s);
        }
    }
    return v;
}

/// c_{2,s} int_B (v(x) - v(y)) |x - y|^{-2-2s} dy at an exterior point x. Uses the
/// reference rule when the interior evaluator is available, else the grid rule.
inline double neumann_residual(const ExtendedFunction& v, const Point2& x, FracOrder s) {
    const PolarGrid& g = v.interior.grid;
    const double R = g.radial.R;
    detail::require_exterior(x, R, "neumann_residual");
    const double vx = v.at_exterior(x);
    const double c = riesz_constant(Dimension(2), s);
    if (v.interior.exact) {
        const auto& f = v.interior.exact;
        const double acc = detail::disk_integral_near(R, x, v.interior.kinks, [&](double r, double t) {
            return (vx - f(r, t)) * detail::riesz_kernel_2d(x.x - r * std::cos(t), x.y - r * std::sin(t), s);
        });
        return c * acc;
    }
    double acc = 0.0;
    for (int i = 0; i < g.interior_rings(); ++i) {
        const double r = g.ring_radius(i), w = g.area_weight(i);
        for (int a = 0; a < g.n_angles; ++a) {
            const double t = g.angle(a);
            acc += w * (vx - v.interior.values[g.index(i, a)]) *
                   detail::riesz_kernel_2d(x.x - r * std::cos(t), x.y - r * std::sin(t), s);
        }
    }
    return c * acc;
}

/// Grid refined twice in each direction (cells and angles), same radii.
inline PolarGrid refine(const PolarGrid& g) {
    RadialGrid r = g.radial;
    auto split = [](const std::vector<double>& b) {
        std::vector<double> out{b.front()};
        for (std::size_t i = 1; i < b.size(); ++i) {
            out.push_back(0.5 * (b[i - 1] + b[i]));
            out.push_back(b[i]);
        }
        return out;
    };
    r.interior_breaks = split(r.interior_breaks);
    r.exterior_breaks = split(r.exterior_breaks);
    r.interior_nodes.clear();
    r.interior_weights.clear();
    r.exterior_nodes.clear();
    r.exterior_weights.clear();
    detail::fill_cells(r.interior_breaks, r.points_per_cell, r.interior_nodes, r.interior_weights);
    detail::fill_cells(r.exterior_breaks, r.points_per_cell, r.exterior_nodes, r.exterior_weights);
    return PolarGrid(std::move(r), 2 * g.n_angles);
}

/// A-posteriori bound for the Neumann residual of the grid extension at x:
/// c_{2,s} int_B k(x-y) dy times |u~_grid(x) - u~_refined(x)|, plus a rounding
/// floor of the reference rule relative to max |u|. Needs an evaluator.
inline double certified_residual_tolerance(const InteriorFunction& u, const Point2& x, FracOrder s) {
    if (!u.exact) throw ConstructionError("certified_residual_tolerance: interior evaluator required");
    const InteriorFunction fine = sample_interior(refine(u.grid), u.exact, u.kinks);
    const double diff = std::abs(minimal_extension_value(u, x, s) - minimal_extension_value(fine, x, s));
    double umax = 0.0;
    for (double v : fine.values) umax = std::max(umax, std::abs(v));
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * umax;
    return riesz_constant(Dimension(2), s) * detail::kernel_mass_reference(u.grid.radial.R, x, s) * (diff + floor);
}

/// Per-mode extension by the grid rule: f holds values at the interior radial nodes.
inline std::vector<double> extension_radial_mode(std::span<const double> f, int l, FracOrder s,
                                                 const RadialGrid& grid, std::span<const double> radii) {
    if (f.size() != grid.interior_nodes.size()) throw ConstructionError("extension_radial_mode: size mismatch");
    if (l < 0) throw DomainError("extension_radial_mode: mode must be nonnegative");
    std::vector<double> out;
    std::vector<double> k(l + 1), dfc(l + 1);
    for (double r : radii) {
        if (!(r > grid.R)) throw DomainError("extension_radial_mode: radius must exceed R");
        double num = 0.0, den = 0.0;
        for (std::size_t p = 0; p < f.size(); ++p) {
            const double rho = grid.interior_nodes[p];
            mode_kernels(r, rho, r - rho, s.value(), l, k, dfc);
            const double w = grid.interior_weights[p] * rho;
            num += w * k[l] * f[p];
            den += w * k[0];
        }
        out.push_back(num / den);
    }
    return out;
}

/// Extension of mode-l hat functions with quadrature graded toward r = R, in the
/// form F_l(r) = f(R) + C_l(r) . f so that F_l(r) - f(rho) never cancels near R.
class ModeExtension {
public:
    ModeExtension(RadialHatBasis basis, FracOrder s, int lmax, int q = 10)
        : basis_(std::move(basis)), s_(s), lmax_(lmax), q_(q) {
        if (lmax < 0) throw DomainError("ModeExtension: lmax must be nonnegative");
    }
    const RadialHatBasis& basis() const { return basis_; }
    int lmax() const { return lmax_; }
    int stride() const { return basis_.nodes(); }

    /// C_l(r) for l = 0..lmax, row-major ((lmax+1) x nodes).
    void corrections(double r, std::span<double> out) const {
        const int n = basis_.cells();
        const int nn = basis_.nodes();
        const double R = basis_.R();
        if (!(r > R)) throw DomainError("ModeExtension: radius must exceed R");
        std::vector<double> k0part(nn, 0.0), dpart(static_cast<std::size_t>(lmax_ + 1) * nn, 0.0);
        std::vector<double> kv(lmax_ + 1), dv(lmax_ + 1);
        double den = 0.0;
        const Rule& gl = gauss_legendre(q_);
        for (int c = 0; c < n; ++c) {
            const double h = basis_.width(c), right = basis_.node(c + 1);
            const double dist = r - right;
            const auto br = dist >= h ? std::vector<double>{0.0, h} : doubling_breaks(dist, h);
            for (std::size_t j = 0; j + 1 < br.size(); ++j) {
                const double u0 = br[j], hu = br[j + 1] - br[j];
                for (std::size_t p = 0; p < gl.size(); ++p) {
                    const double u = u0 + hu * gl.nodes[p];
                    const double rho = right - u;
                    mode_kernels(r, rho, dist + u, s_.value(), lmax_, kv, dv);
                    const double w = hu * gl.weights[p] * rho;
                    const double wk = w * kv[0];
                    const double tl = u / h;  // shape of the left node
                    den += wk;
                    k0part[c] += wk * tl;
                    if (c + 1 == n) {
                        k0part[n] -= wk * tl;
                    } else {
                        k0part[c + 1] += wk * (1.0 - tl);
                        k0part[n] -= wk;
                    }
                    for (int l = 1; l <= lmax_; ++l) {
                        dpart[static_cast<std::size_t>(l) * nn + c] += w * dv[l] * tl;
                        dpart[static_cast<std::size_t>(l) * nn + c + 1] += w * dv[l] * (1.0 - tl);
                    }
                }
            }
        }
        for (int l = 0; l <= lmax_; ++l) {
            for (int i = 0; i < nn; ++i) {
                out[static_cast<std::size_t>(l) * nn + i] = (k0part[i] - dpart[static_cast<std::size_t>(l) * nn + i]) / den;
            }
        }
    }

    /// F_l(r) for nodal coefficients f.
    double value(int l, std::span<const double> f, double r) const {
        if (l > lmax_) throw DomainError("ModeExtension: mode above lmax");
        std::vector<double> c(static_cast<std::size_t>(lmax_ + 1) * stride());
        corrections(r, c);
        double v = f[basis_.cells()];
        for (int i = 0; i < stride(); ++i) v += c[static_cast<std::size_t>(l) * stride() + i] * f[i];
        return v;
    }

private:
    RadialHatBasis basis_;
    FracOrder s_;
    int lmax_;
    int q_;
};

}  // namespace fracspec
