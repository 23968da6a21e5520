#pragma once

/// @file solver.hpp
/// End-to-end runs on the unit disk: grid setup, per-mode spectra, eigenfunction
/// fields on a polar grid, s-sweeps against the local limit, and the gradient-limit check.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <future>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "fracspec/assembly.hpp"
#include "fracspec/eigensolver.hpp"
#include "fracspec/full2d.hpp"
#include "fracspec/geometry.hpp"
#include "fracspec/localref.hpp"
#include "fracspec/symmetry.hpp"

namespace fracspec {

struct SolverConfig {
    double R = 1.0;
    int n_int = 32;          ///< interior radial cells
    int n_ext = 24;          ///< exterior radial cells
    double r_inf = 0.0;      ///< 0 selects tail_bound(s, 2, R, tail_tol)
    double grading = 2.0;
    double tail_tol = 1e-6;
    int lmax = 2;
    int count = 3;           ///< eigenvalues per mode
    int n_angles = 32;       ///< angles of the polar grid used for fields
    AssemblyOptions assembly;
};

inline RadialGrid make_grid(const SolverConfig& c, FracOrder s) {
    const double r_inf = c.r_inf > 0.0 ? c.r_inf : tail_bound(s, Dimension(2), c.R, c.tail_tol);
    return make_radial_grid(c.R, c.n_int, r_inf, c.n_ext, c.grading);
}

struct ModeSpectrum {
    int mode = 0;
    SpectralProblem problem;
    std::vector<EigenPair> pairs;  ///< admissible pairs, ascending
    std::vector<double> residuals;
    std::optional<EigenPair> zero_mode;  ///< l = 0 only: smallest unconstrained pair
};

struct DiskSpectrum {
    double s = 0.5;
    RadialGrid grid;
    std::vector<ModeSpectrum> modes;
};

inline DiskSpectrum solve_disk(FracOrder s, const SolverConfig& c) {
    DiskSpectrum out{s.value(), make_grid(c, s), {}};
    auto problems = assemble_mode_problems(s, out.grid, c.lmax, c.assembly);
    for (auto& p : problems) {
        ModeSpectrum m;
        m.mode = p.mode;
        const int k = std::min(c.count, p.size() - (p.constraint ? 1 : 0));
        m.pairs = solve_generalized(p, k);
        for (const auto& e : m.pairs) m.residuals.push_back(pencil_residual(e, p));
        if (p.mode == 0) m.zero_mode = solve_unconstrained(p, 1).front();
        m.problem = std::move(p);
        out.modes.push_back(std::move(m));
    }
    return out;
}

/// Smallest admissible eigenvalue over all modes and the mode attaining it.
inline std::pair<double, int> first_nontrivial(const DiskSpectrum& d) {
    double best = INFINITY;
    int mode = -1;
    for (const auto& m : d.modes) {
        if (!m.pairs.empty() && m.pairs.front().mu < best) {
            best = m.pairs.front().mu;
            mode = m.mode;
        }
    }
    return {best, mode};
}

/// Samples of a pair on g: hat interpolant inside, mode extension outside, times the angular factor.
inline SampledField mode_field(const ModeSpectrum& m, const EigenPair& e, Parity parity, const PolarGrid& g, FracOrder s) {
    const auto f = m.problem.nodal(e.vector);
    const RadialHatBasis& b = m.problem.basis;
    const ModeExtension ext(b, s, m.mode);
    std::vector<double> prof(g.rings());
    for (int i = 0; i < g.interior_rings(); ++i) prof[i] = b.eval(f, g.ring_radius(i));
    for (int i = g.interior_rings(); i < g.rings(); ++i) prof[i] = ext.value(m.mode, f, g.ring_radius(i));
    std::vector<double> v(g.size());
    for (int i = 0; i < g.rings(); ++i)
        for (int a = 0; a < g.n_angles; ++a) {
            const double t = g.angle(a);
            const double ang = m.mode == 0 ? 1.0 : (parity == Parity::Cos ? std::cos(m.mode * t) : std::sin(m.mode * t));
            v[g.index(i, a)] = prof[i] * ang;
        }
    return SampledField(g, std::move(v));
}

/// Members of the lowest admissible level across modes (cos and sin for l >= 1).
inline std::vector<MultipletMember> first_multiplet(const DiskSpectrum& d, const PolarGrid& g, double rel = 1e-8) {
    const double mu = first_nontrivial(d).first;
    std::vector<MultipletMember> out;
    const FracOrder s(d.s);
    for (const auto& m : d.modes) {
        for (const auto& e : m.pairs) {
            if (std::abs(e.mu - mu) > rel * std::abs(mu)) continue;
            out.push_back({e, Parity::Cos, mode_field(m, e, Parity::Cos, g, s)});
            if (m.mode >= 1) out.push_back({e, Parity::Sin, mode_field(m, e, Parity::Sin, g, s)});
        }
    }
    return out;
}

/// Worker count: FRACSPEC_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRACSPEC_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return n;
}

/// Run f(i) for i in [0, n) on at most `workers` threads; results keep index order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned workers, F&& f) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> err(n);
    std::mutex mu;
    std::size_t next = 0;
    auto work = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(mu);
                if (next >= n) return;
                i = next++;
            }
            try {
                out[i] = f(i);
            } catch (...) {
                err[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < std::min<std::size_t>(workers, n); ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : err)
        if (e) std::rethrow_exception(e);
    return out;
}

struct SweepRow {
    double s;
    int l;
    int k;
    double mu;
    double mu_local;
    double rel_gap;
    int n_int;
    int n_ext;
    double r_inf;
    double grading;
};

struct SweepResult {
    std::vector<SweepRow> rows;           ///< sorted by (s, l, k)
    std::vector<LocalEigenvalue> limit;   ///< local reference levels
};

/// Local reference for (l, k): the k-th root of Theta_l squared.
inline double local_level(int l, int k) {
    const double r = theta_root(l, Dimension(2), k);
    return r * r;
}

inline SweepResult run_sweep(const std::vector<double>& s_list, const SolverConfig& c, unsigned workers) {
    for (double s : s_list) FracOrder check(s);
    auto spectra = parallel_map<DiskSpectrum>(s_list.size(), workers,
                                              [&](std::size_t i) { return solve_disk(FracOrder(s_list[i]), c); });
    SweepResult res;
    res.limit = local_spectrum(Dimension(2), c.R, 6).neumann_values;
    for (const auto& d : spectra) {
        for (const auto& m : d.modes) {
            for (std::size_t k = 0; k < m.pairs.size(); ++k) {
                const double ref = local_level(m.mode, static_cast<int>(k) + 1) / (c.R * c.R);
                res.rows.push_back({d.s, m.mode, static_cast<int>(k) + 1, m.pairs[k].mu, ref,
                                    std::abs(m.pairs[k].mu - ref) / ref, c.n_int, c.n_ext, d.grid.R_inf, c.grading});
            }
        }
    }
    std::stable_sort(res.rows.begin(), res.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.s != b.s) return a.s < b.s;
        if (a.l != b.l) return a.l < b.l;
        return a.k < b.k;
    });
    return res;
}

struct BbmRow {
    double s;
    double lhs;     ///< (1 - s) [u~]^2
    double target;  ///< K_2 int_B |grad u|^2
    double rel_err;
};

/// Test functions: "x1" (u = x_1) and "const" (u = 1).
inline std::vector<BbmRow> bbm_check(const std::vector<double>& s_list, const std::string& fn, const SolverConfig& c,
                                     unsigned workers) {
    if (fn != "x1" && fn != "const") throw DomainError("bbm_check: unknown test function '" + fn + "'");
    for (double s : s_list) FracOrder check(s);
    const int l = fn == "x1" ? 1 : 0;
    const double target = fn == "x1" ? bbm_constant(Dimension(2)) * std::numbers::pi * c.R * c.R : 0.0;
    return parallel_map<BbmRow>(s_list.size(), workers, [&](std::size_t i) {
        const FracOrder s(s_list[i]);
        const RadialGrid grid = make_grid(c, s);
        const RadialHatBasis basis(grid);
        const auto f = basis.interpolate([&](double r) { return l == 1 ? r : 1.0; });
        const PolarGrid pg(grid, c.n_angles);
        InteriorFunction u = sample_interior(pg, [&](double r, double t) { return l == 1 ? r * std::cos(t) : 1.0; });
        const ModeExtension ext(basis, s, l);
        ExtendedFunction v{u, {}, {}, s.value()};
        for (int k = 0; k < pg.exterior_rings(); ++k) {
            const double F = ext.value(l, f, grid.exterior_nodes[k]);
            for (int a = 0; a < pg.n_angles; ++a) v.exterior.push_back(l == 1 ? F * std::cos(pg.angle(a)) : F);
        }
        const double lhs = (1.0 - s.value()) * assemble_full_2d(s, v);
        return BbmRow{s.value(), lhs, target, target > 0.0 ? std::abs(lhs - target) / target : std::abs(lhs)};
    });
}

/// Limit at s -> 1 of values sampled at eps = 1 - s, by a polynomial fit through all points.
inline double extrapolate_to_one(const std::vector<double>& s, const std::vector<double>& v) {
    const std::size_t n = s.size();
    if (n == 0 || v.size() != n) throw DomainError("extrapolate_to_one: size mismatch");
    double out = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) w *= (0.0 - (1.0 - s[j])) / ((1.0 - s[i]) - (1.0 - s[j]));
        out += w * v[i];
    }
    return out;
}

}  // namespace fracspec
