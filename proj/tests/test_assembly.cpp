#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fracspec/assembly.hpp"
#include "fracspec/eigensolver.hpp"
#include "fracspec/full2d.hpp"
#include "fracspec/symmetry.hpp"

using namespace fracspec;

namespace {

RadialGrid coarse(double s, int n = 6) {
    return make_radial_grid(1.0, n, tail_bound(FracOrder(s), Dimension(2), 1.0, 1e-6), 12, 2.0);
}

// u(r, theta) = f(r) cos(l theta), f the hat interpolant of coef, exterior from ModeExtension
ExtendedFunction mode_function(const RadialGrid& grid, const std::vector<double>& coef, int l, FracOrder s, int angles) {
    const RadialHatBasis basis(grid);
    const PolarGrid pg(grid, angles);
    const auto u = sample_interior(pg, [=](double r, double t) { return basis.eval(coef, r) * std::cos(l * t); },
                                   basis.breaks());
    const ModeExtension ext(basis, s, l);
    ExtendedFunction v{u, {}, {}, s.value()};
    for (int k = 0; k < pg.exterior_rings(); ++k) {
        const double F = ext.value(l, coef, grid.exterior_nodes[k]);
        for (int a = 0; a < pg.n_angles; ++a) v.exterior.push_back(F * std::cos(l * pg.angle(a)));
    }
    return v;
}

double quad(const Eigen::MatrixXd& S, const std::vector<double>& c) {
    const Eigen::Map<const Eigen::VectorXd> x(c.data(), static_cast<Eigen::Index>(c.size()));
    return x.dot(S * x);
}

}  // namespace

TEST(Assembly, SymmetricPositiveSemidefinite) {
    const FracOrder s(0.5);
    const auto probs = assemble_mode_problems(s, coarse(0.5, 8), 3);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (const auto& p : probs) {
        EXPECT_LE((p.A - p.A.transpose()).norm(), 1e-14 * p.A.norm());
        EXPECT_LE((p.M - p.M.transpose()).norm(), 1e-14 * p.M.norm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(p.M);
        EXPECT_GT(em.eigenvalues().minCoeff(), 0.0);
        for (int t = 0; t < 100; ++t) {
            Eigen::VectorXd x(p.size());
            for (int i = 0; i < x.size(); ++i) x(i) = nd(rng);
            EXPECT_GE(x.dot(p.A * x), -1e-10 * p.A.norm() * x.squaredNorm());
        }
    }
}

TEST(Assembly, ConstantsHaveZeroEnergy) {
    for (double sv : {0.25, 0.75, 0.95}) {
        const auto p = assemble_mode_problem(0, FracOrder(sv), coarse(sv, 8));
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(p.size());
        const double mu1 = solve_generalized(p, 1).front().mu;
        EXPECT_LE(std::abs(rayleigh(p, one)), 1e-8 * mu1) << sv;
    }
}

TEST(Assembly, MassMatrixIntegratesArea) {
    const auto g = coarse(0.5, 8);
    const RadialHatBasis b(g);
    const auto M = mass_matrix(b, 0);
    EXPECT_NEAR(M.sum(), std::numbers::pi, 1e-13);
    EXPECT_NEAR(mass_matrix(b, 2).sum(), 0.5 * std::numbers::pi, 1e-13);
}

TEST(Assembly, DirectCrossMatchesBlockElimination) {
    for (double sv : {0.3, 0.8}) {
        const auto g = coarse(sv, 6);
        AssemblyOptions direct;
        direct.direct_cross = true;
        const auto a = assemble_mode_problems(FracOrder(sv), g, 2);
        const auto b = assemble_mode_problems(FracOrder(sv), g, 2, direct);
        for (int l = 0; l <= 2; ++l) EXPECT_LE((a[l].A - b[l].A).norm(), 1e-10 * a[l].A.norm()) << sv << " " << l;
    }
}

TEST(Assembly, MatchesFullTwoDimensionalQuadrature) {
    const FracOrder s(0.5);
    const auto g = coarse(0.5, 6);
    const RadialHatBasis b(g);
    const auto S = seminorm_forms(b, g, s, 2, {});
    const std::vector<std::vector<double>> profiles{
        b.interpolate([](double r) { return r * r; }), b.interpolate([](double r) { return r; }),
        b.interpolate([](double r) { return r * r * (1.5 - r); })};
    for (int l = 0; l <= 2; ++l) {
        const double full = assemble_full_2d(s, mode_function(g, profiles[l], l, s, 16));
        EXPECT_NEAR(quad(S[l], profiles[l]) / full, 1.0, 1e-3) << l;
    }
}

TEST(Assembly, CrossModeFormsVanish) {
    const FracOrder s(0.6);
    const auto g = coarse(0.6, 6);
    const RadialHatBasis b(g);
    const auto f = b.interpolate([](double r) { return r; });
    const auto h = b.interpolate([](double r) { return r * r; });
    auto u = mode_function(g, f, 1, s, 16), w = mode_function(g, h, 2, s, 16);
    // discrete form on the polar nodes: circulant in angle, so modes decouple to rounding
    const DiscreteSeminorm semi(u.interior.grid, s);
    const SampledField fu = from_extended(u), fw = from_extended(w);
    std::vector<double> sum(fu.values.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = fu.values[i] + fw.values[i];
    const double qu = semi(fu), qw = semi(fw), qs = semi(SampledField(fu.grid, sum));
    EXPECT_LE(std::abs(0.5 * (qs - qu - qw)), 1e-6 * std::sqrt(qu * qw));
    // full 2D quadrature of the same bilinear form
    ExtendedFunction both = u;
    const auto fu_exact = u.interior.exact, fw_exact = w.interior.exact;
    both.interior = sample_interior(u.interior.grid, [=](double r, double t) { return fu_exact(r, t) + fw_exact(r, t); },
                                    b.breaks());
    for (std::size_t i = 0; i < both.exterior.size(); ++i) both.exterior[i] += w.exterior[i];
    const double Fu = assemble_full_2d(s, u), Fw = assemble_full_2d(s, w), Fs = assemble_full_2d(s, both);
    EXPECT_LE(std::abs(0.5 * (Fs - Fu - Fw)), 1e-6 * std::sqrt(Fu * Fw));
}

TEST(Assembly, RayleighProperties) {
    const auto p = assemble_mode_problem(1, FracOrder(0.5), coarse(0.5, 8));
    const auto e = solve_generalized(p, 2);
    EXPECT_NEAR(rayleigh(p, e[0].vector), e[0].mu, 1e-12 * e[0].mu);
    EXPECT_NEAR(rayleigh(p, -3.0 * e[1].vector), e[1].mu, 1e-12 * e[1].mu);
    EXPECT_THROW(rayleigh(p, Eigen::VectorXd::Zero(p.size())), DomainError);
    EXPECT_THROW(rayleigh(p, Eigen::VectorXd::Ones(p.size() + 1)), ConstructionError);
}

TEST(Assembly, RefinementDoesNotRaiseEigenvalues) {
    const FracOrder s(0.7);
    const auto g = coarse(0.7, 8);
    RadialGrid fine = g;
    fine.interior_breaks.clear();
    for (std::size_t i = 0; i + 1 < g.interior_breaks.size(); ++i) {
        fine.interior_breaks.push_back(g.interior_breaks[i]);
        fine.interior_breaks.push_back(0.5 * (g.interior_breaks[i] + g.interior_breaks[i + 1]));
    }
    fine.interior_breaks.push_back(1.0);
    fine.interior_nodes.clear();
    fine.interior_weights.clear();
    detail::fill_cells(fine.interior_breaks, fine.points_per_cell, fine.interior_nodes, fine.interior_weights);
    for (int l = 0; l <= 2; ++l) {
        const auto a = solve_generalized(assemble_mode_problem(l, s, g), 3);
        const auto b = solve_generalized(assemble_mode_problem(l, s, fine), 3);
        for (int k = 0; k < 3; ++k) EXPECT_LE(b[k].mu, a[k].mu * (1.0 + 1e-7)) << l << " " << k;
    }
}

TEST(Assembly, Errors) {
    const auto g = coarse(0.5, 6);
    const RadialHatBasis other(make_radial_grid(2.0, 6, 4.0, 6, 1.0));
    EXPECT_THROW(seminorm_forms(other, g, FracOrder(0.5), 1, {}), ConstructionError);
    EXPECT_THROW(assemble_mode_problem(-1, FracOrder(0.5), g), DomainError);
    const auto u = sample_interior(PolarGrid(g, 8), [](double, double) { return 1.0; });
    ExtendedFunction v{u, {}, {}, 0.5};
    EXPECT_THROW(assemble_full_2d(FracOrder(0.5), v), ConstructionError);
}
