#pragma once

/// @file assembly.hpp
/// Galerkin matrices for u = f(r) cos(l theta) on the disk with f in the radial
/// hat space and exterior values given by the minimal extension.
///
/// With k = |x - y|^{-2-2s}, pi_l = pi (1 + [l = 0]) and D_l = K_0 - K_l:
///   [u~]^2 = pi_l int_B int_B ((f(r) - f(rho))^2 K_0 + 2 f(r) f(rho) D_l) r rho
///          + 2 pi_l int_B int_{R}^{R_inf} ((F(r) - f(rho))^2 K_0 + 2 F(r) f(rho) D_l) r rho
/// and A = (c_{2,s} / 2) [.,.], M = pi_l int f g r dr.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracspec/angular.hpp"
#include "fracspec/basis.hpp"
#include "fracspec/error.hpp"
#include "fracspec/extension.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/kernelmath.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

struct AssemblyOptions {
    int q_far = 8;         ///< tensor Gauss points per direction on separated cells
    int q_singular = 8;    ///< points per panel of the graded singular rules
    int levels = 6;        ///< geometric levels of the graded singular rules
    double ratio = 0.2;    ///< geometric ratio of the graded singular rules
    int q_duffy = 8;       ///< points in the regular Duffy direction
    bool direct_cross = false;  ///< accumulate the exterior term by rank-one updates
};

struct SpectralProblem {
    int mode = 0;
    double s = 0.5;
    double scale = 1.0;  ///< c_{2,s} / 2, so A / scale is the bare seminorm form
    Eigen::MatrixXd A;
    Eigen::MatrixXd M;
    std::optional<Eigen::VectorXd> constraint;  ///< m_i = int_B phi_i dx for l = 0
    std::vector<int> dofs;                      ///< hat nodes carried by the problem
    RadialHatBasis basis{std::vector<double>{0.0, 1.0}};

    int size() const { return static_cast<int>(dofs.size()); }
    /// Expand problem coefficients to nodal hat coefficients.
    std::vector<double> nodal(const Eigen::VectorXd& x) const {
        std::vector<double> f(basis.nodes(), 0.0);
        for (int i = 0; i < size(); ++i) f[dofs[i]] = x(i);
        return f;
    }
};

namespace detail {

struct ModeAccumulator {
    int lmax;
    int nn;
    std::vector<Eigen::MatrixXd> S;  // bare seminorm forms over all nodes
    std::vector<double> kv, dv;

    ModeAccumulator(int l, int n) : lmax(l), nn(n), kv(l + 1), dv(l + 1) {
        for (int m = 0; m <= lmax; ++m) S.emplace_back(Eigen::MatrixXd::Zero(nn, nn));
    }
    static double pi_l(int l) { return l == 0 ? 2.0 * std::numbers::pi : std::numbers::pi; }

    /// Local update with up to 4 dofs: w (Delta Delta^T K0 + (pr pq^T + pq pr^T) D_l),
    /// where pr, pq are shape values at r and rho and Delta = pr - pq given exactly.
    template <int K>
    void add_local(const int (&idx)[K], const double (&delta)[K], const double (&pr)[K],
                   const double (&pq)[K], double w) {
        for (int l = 0; l <= lmax; ++l) {
            const double wl = w * pi_l(l);
            const double a = wl * kv[0];
            const double b = wl * dv[l];
            Eigen::MatrixXd& m = S[l];
            for (int i = 0; i < K; ++i) {
                for (int j = 0; j < K; ++j) {
                    m(idx[i], idx[j]) += a * delta[i] * delta[j] + b * (pr[i] * pq[j] + pq[i] * pr[j]);
                }
            }
        }
    }
};

}  // namespace detail

/// Bare seminorm forms [.,.] for l = 0..lmax over all hat nodes (before c/2 scaling
/// and dof restriction).
inline std::vector<Eigen::MatrixXd> seminorm_forms(const RadialHatBasis& basis, const RadialGrid& grid,
                                                   FracOrder s, int lmax,
                                                   const AssemblyOptions& opt = {}) {
    const double sv = s.value();
    const int n = basis.cells();
    const int nn = basis.nodes();
    const double R = basis.R();
    if (std::abs(R - grid.R) > 1e-12 * R) throw ConstructionError("seminorm_forms: basis and grid radii differ");
    if (lmax < 0) throw DomainError("seminorm_forms: lmax must be nonnegative");
    detail::ModeAccumulator acc(lmax, nn);

    const Rule& gf = gauss_legendre(opt.q_far);
    const Rule& ge = gauss_legendre(opt.q_duffy);
    const double bx = std::min(1.0, 2.0 - 2.0 * sv);
    const Rule rx = graded_rule(bx, opt.levels, opt.q_singular, opt.ratio);
    const Rule ry = graded_rule(1.0 - 2.0 * sv, opt.levels, opt.q_singular, opt.ratio);
    const Rule rt = graded_rule(bx, opt.levels, opt.q_singular, opt.ratio);

    auto eval = [&](double r, double rho, double d) { mode_kernels(r, rho, d, sv, lmax, acc.kv, acc.dv); };

    // interior x interior
    for (int c = 0; c < n; ++c) {
        const double a = basis.node(c), h = basis.width(c);
        // identical cell: r = a + h x, rho = r - h x y, both triangles
        for (std::size_t i = 0; i < rx.size(); ++i) {
            const double x = rx.nodes[i];
            for (std::size_t j = 0; j < ry.size(); ++j) {
                const double y = ry.nodes[j];
                const double d = h * x * y;
                const double r = a + h * x;
                const double rho = r - d;
                const double w = 2.0 * h * h * x * rx.weights[i] * ry.weights[j] * r * rho;
                eval(r, rho, d);
                const double tr = x, tq = x * (1.0 - y);
                const int idx[2] = {c, c + 1};
                const double del[2] = {-x * y, x * y};
                const double pr[2] = {1.0 - tr, tr};
                const double pq[2] = {1.0 - tq, tq};
                acc.add_local<2>(idx, del, pr, pq, w);
            }
        }
        if (c == 0) continue;
        // vertex-adjacent: rho in cell c-1 (width hj), r in cell c (width h), shared node c
        const double hj = basis.width(c - 1), v = basis.node(c);
        for (int tri = 0; tri < 2; ++tri) {
            for (std::size_t i = 0; i < rt.size(); ++i) {
                const double t = rt.nodes[i];
                for (std::size_t j = 0; j < ge.size(); ++j) {
                    const double e = ge.nodes[j];
                    const double x = tri == 0 ? hj * t : hj * t * e;
                    const double y = tri == 0 ? h * t * e : h * t;
                    const double r = v + y, rho = v - x;
                    const double w = 2.0 * hj * h * t * rt.weights[i] * ge.weights[j] * r * rho;
                    eval(r, rho, x + y);
                    const int idx[3] = {c - 1, c, c + 1};
                    const double del[3] = {-x / hj, x / hj - y / h, y / h};
                    const double pr[3] = {0.0, 1.0 - y / h, y / h};
                    const double pq[3] = {x / hj, 1.0 - x / hj, 0.0};
                    acc.add_local<3>(idx, del, pr, pq, w);
                }
            }
        }
        // separated cells: rho in cell j <= c - 2
        for (int jc = 0; jc + 2 <= c; ++jc) {
            const double aj = basis.node(jc), hjj = basis.width(jc);
            for (std::size_t i = 0; i < gf.size(); ++i) {
                const double tr = gf.nodes[i];
                const double r = a + h * tr;
                for (std::size_t j = 0; j < gf.size(); ++j) {
                    const double tq = gf.nodes[j];
                    const double rho = aj + hjj * tq;
                    const double w = 2.0 * h * hjj * gf.weights[i] * gf.weights[j] * r * rho;
                    eval(r, rho, r - rho);
                    const int idx[4] = {c, c + 1, jc, jc + 1};
                    const double del[4] = {1.0 - tr, tr, -(1.0 - tq), -tq};
                    const double pr[4] = {1.0 - tr, tr, 0.0, 0.0};
                    const double pq[4] = {0.0, 0.0, 1.0 - tq, tq};
                    acc.add_local<4>(idx, del, pr, pq, w);
                }
            }
        }
    }

    // interior x exterior, counted twice
    const ModeExtension ext_l(basis, s, lmax);
    const std::size_t stride = static_cast<std::size_t>(lmax + 1) * nn;

    // exterior samples away from the corner: Gauss points of exterior cells, with the
    // first exterior cell graded toward R
    std::vector<double> er, ew;
    const Rule r0 = graded_rule(std::min(1.0, 2.0 * sv), 4, opt.q_far, 0.25);
    const int first_cell_count = static_cast<int>(r0.size());
    {
        for (int k = 0; k < grid.exterior_cells(); ++k) {
            const double e0 = grid.exterior_breaks[k], he = grid.exterior_breaks[k + 1] - e0;
            const Rule& rule = k == 0 ? r0 : gf;
            for (std::size_t i = 0; i < rule.size(); ++i) {
                er.push_back(e0 + he * rule.nodes[i]);
                ew.push_back(he * rule.weights[i]);
            }
        }
    }
    std::vector<double> rows(er.size() * stride);
    for (std::size_t q = 0; q < er.size(); ++q) ext_l.corrections(er[q], std::span<double>(rows.data() + q * stride, stride));

    auto erow = [&](const double* c, int l, int i) { return c[static_cast<std::size_t>(l) * nn + i] + (i == n ? 1.0 : 0.0); };

    if (!opt.direct_cross) {
        for (int l = 0; l <= lmax; ++l) {
            const double pil = detail::ModeAccumulator::pi_l(l);
            Eigen::MatrixXd& S = acc.S[l];
            Eigen::VectorXd Eq(nn), czf(nn);
            for (std::size_t q = 0; q < er.size(); ++q) {
                const bool first = static_cast<int>(q) < first_cell_count;
                const double r = er[q];
                double czz = 0.0;
                czf.setZero();
                const int cmax = first ? n - 1 : n;  // corner cell handled separately
                for (int c = 0; c < cmax; ++c) {
                    const double a = basis.node(c), h = basis.width(c);
                    for (std::size_t j = 0; j < gf.size(); ++j) {
                        const double tq = gf.nodes[j];
                        const double rho = a + h * tq;
                        mode_kernels(r, rho, r - rho, sv, lmax, acc.kv, acc.dv);
                        const double W = 2.0 * pil * ew[q] * h * gf.weights[j] * r * rho;
                        const double k0 = acc.kv[0], dl = acc.dv[l];
                        czz += W * k0;
                        czf(c) += W * (dl - k0) * (1.0 - tq);
                        czf(c + 1) += W * (dl - k0) * tq;
                        const double p0 = 1.0 - tq, p1 = tq;
                        S(c, c) += W * k0 * p0 * p0;
                        S(c, c + 1) += W * k0 * p0 * p1;
                        S(c + 1, c) += W * k0 * p0 * p1;
                        S(c + 1, c + 1) += W * k0 * p1 * p1;
                    }
                }
                const double* cr = rows.data() + q * stride;
                for (int i = 0; i < nn; ++i) Eq(i) = erow(cr, l, i);
                S.noalias() += czz * Eq * Eq.transpose();
                S.noalias() += Eq * czf.transpose();
                S.noalias() += czf * Eq.transpose();
            }
        }
    } else {
        Eigen::VectorXd Eq(nn), del(nn), pq(nn);
        for (std::size_t q = 0; q < er.size(); ++q) {
            const bool first = static_cast<int>(q) < first_cell_count;
            const double r = er[q];
            const double* cr = rows.data() + q * stride;
            const int cmax = first ? n - 1 : n;
            for (int c = 0; c < cmax; ++c) {
                const double a = basis.node(c), h = basis.width(c);
                for (std::size_t j = 0; j < gf.size(); ++j) {
                    const double tq = gf.nodes[j];
                    const double rho = a + h * tq;
                    mode_kernels(r, rho, r - rho, sv, lmax, acc.kv, acc.dv);
                    for (int l = 0; l <= lmax; ++l) {
                        const double W = 2.0 * detail::ModeAccumulator::pi_l(l) * ew[q] * h * gf.weights[j] * r * rho;
                        pq.setZero();
                        pq(c) = 1.0 - tq;
                        pq(c + 1) = tq;
                        for (int i = 0; i < nn; ++i) Eq(i) = erow(cr, l, i);
                        del = Eq - pq;
                        acc.S[l].noalias() += (W * acc.kv[0]) * del * del.transpose();
                        acc.S[l].noalias() += (W * acc.dv[l]) * (Eq * pq.transpose() + pq * Eq.transpose());
                    }
                }
            }
        }
    }

    // corner: rho in the last interior cell, r in the first exterior cell
    {
        const double hi = basis.width(n - 1);
        const double h0 = grid.exterior_breaks[1] - grid.exterior_breaks[0];
        const Rule rc = graded_rule(std::min({1.0, 2.0 * sv, 2.0 - 2.0 * sv}), opt.levels, opt.q_singular, opt.ratio);
        std::vector<double> cr(stride);
        Eigen::VectorXd Eq(nn), del(nn), pq(nn);
        for (int tri = 0; tri < 2; ++tri) {
            for (std::size_t i = 0; i < rc.size(); ++i) {
                const double t = rc.nodes[i];
                for (std::size_t j = 0; j < ge.size(); ++j) {
                    const double e = ge.nodes[j];
                    const double x = tri == 0 ? hi * t : hi * t * e;  // R - rho
                    const double y = tri == 0 ? h0 * t * e : h0 * t;  // r - R
                    const double r = R + y, rho = R - x;
                    ext_l.corrections(r, cr);
                    mode_kernels(r, rho, x + y, sv, lmax, acc.kv, acc.dv);
                    pq.setZero();
                    pq(n) = 1.0 - x / hi;
                    pq(n - 1) = x / hi;
                    for (int l = 0; l <= lmax; ++l) {
                        const double W = 2.0 * detail::ModeAccumulator::pi_l(l) * hi * h0 * t * rc.weights[i] *
                                         ge.weights[j] * r * rho;
                        for (int k = 0; k < nn; ++k) {
                            del(k) = cr[static_cast<std::size_t>(l) * nn + k];
                            Eq(k) = del(k) + (k == n ? 1.0 : 0.0);
                        }
                        del(n) += x / hi;
                        del(n - 1) -= x / hi;
                        acc.S[l].noalias() += (W * acc.kv[0]) * del * del.transpose();
                        acc.S[l].noalias() += (W * acc.dv[l]) * (Eq * pq.transpose() + pq * Eq.transpose());
                    }
                }
            }
        }
    }
    for (auto& S : acc.S) S = 0.5 * (S + S.transpose()).eval();
    return acc.S;
}

/// Mass matrix pi_l int phi_i phi_j r dr over all hat nodes.
inline Eigen::MatrixXd mass_matrix(const RadialHatBasis& basis, int l) {
    const int nn = basis.nodes();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nn, nn);
    const Rule& g = gauss_legendre(3);
    const double pil = detail::ModeAccumulator::pi_l(l);
    for (int c = 0; c < basis.cells(); ++c) {
        const double a = basis.node(c), h = basis.width(c);
        for (std::size_t p = 0; p < g.size(); ++p) {
            const double t = g.nodes[p], r = a + h * t, w = pil * h * g.weights[p] * r;
            const double v[2] = {1.0 - t, t};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) M(c + i, c + j) += w * v[i] * v[j];
        }
    }
    return M;
}

inline SpectralProblem make_problem(const RadialHatBasis& basis, int l, FracOrder s, const Eigen::MatrixXd& S) {
    SpectralProblem p;
    p.mode = l;
    p.s = s.value();
    p.basis = basis;
    p.scale = 0.5 * riesz_constant(Dimension(2), s);
    const int first = l == 0 ? 0 : 1;
    for (int i = first; i < basis.nodes(); ++i) p.dofs.push_back(i);
    const int m = p.size();
    const Eigen::MatrixXd Mf = mass_matrix(basis, l);
    p.A.resize(m, m);
    p.M.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            p.A(i, j) = p.scale * S(p.dofs[i], p.dofs[j]);
            p.M(i, j) = Mf(p.dofs[i], p.dofs[j]);
        }
    if (l == 0) {
        // m_i = int_B phi_i = M 1 since the hats sum to one
        p.constraint = p.M * Eigen::VectorXd::Ones(m);
    }
    return p;
}

/// Problems for every mode 0..lmax sharing one pass of kernel evaluations.
inline std::vector<SpectralProblem> assemble_mode_problems(FracOrder s, const RadialGrid& grid, int lmax,
                                                           const AssemblyOptions& opt = {}) {
    const RadialHatBasis basis(grid);
    const auto S = seminorm_forms(basis, grid, s, lmax, opt);
    std::vector<SpectralProblem> out;
    for (int l = 0; l <= lmax; ++l) out.push_back(make_problem(basis, l, s, S[l]));
    return out;
}

inline SpectralProblem assemble_mode_problem(int l, FracOrder s, const RadialGrid& grid,
                                             const AssemblyOptions& opt = {}) {
    if (l < 0) throw DomainError("assemble_mode_problem: mode must be nonnegative");
    return assemble_mode_problems(s, grid, l, opt)[l];
}

inline double rayleigh(const SpectralProblem& p, const Eigen::VectorXd& x) {
    if (x.size() != p.size()) throw ConstructionError("rayleigh: vector size mismatch");
    const double den = x.dot(p.M * x);
    if (!(den > 0.0)) throw DomainError("rayleigh: zero vector");
    return x.dot(p.A * x) / den;
}

/// Plain-text dump (row-major, whitespace separated).
inline void write_matrix(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConstructionError("write_matrix: cannot open " + path);
    out.precision(17);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
        out << '\n';
    }
}

}  // namespace fracspec
