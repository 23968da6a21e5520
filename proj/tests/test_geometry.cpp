#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "fracspec/basis.hpp"
#include "fracspec/geometry.hpp"

using namespace fracspec;

TEST(RadialGrid, InteriorWeightsSumToRadius) {
    const auto g = make_radial_grid(1.0, 16, 4.0, 8, 1.0);
    double w = 0.0;
    for (double x : g.interior_weights) w += x;
    EXPECT_NEAR(w, 1.0, 1e-12);
    double we = 0.0;
    for (double x : g.exterior_weights) we += x;
    EXPECT_NEAR(we, 3.0, 1e-12);
}

TEST(RadialGrid, PolynomialExactness) {
    const auto g = make_radial_grid(1.0, 9, 3.0, 6, 2.0);
    for (int k = 0; k <= 11; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.interior_nodes.size(); ++i)
            acc += g.interior_weights[i] * std::pow(g.interior_nodes[i], k);
        EXPECT_NEAR(acc, 1.0 / (k + 1), 1e-13) << k;
    }
}

TEST(RadialGrid, GradingClustersTowardBoundary) {
    const auto g = make_radial_grid(1.0, 16, 4.0, 8, 2.0);
    const auto& b = g.interior_breaks;
    double hmin = INFINITY;
    int cmin = -1;
    for (int c = 0; c + 1 < static_cast<int>(b.size()); ++c) {
        if (b[c + 1] - b[c] < hmin) {
            hmin = b[c + 1] - b[c];
            cmin = c;
        }
    }
    EXPECT_EQ(cmin, 15);
    // exterior starts at the last interior width
    EXPECT_NEAR(g.exterior_breaks[1] - g.exterior_breaks[0], hmin, 1e-12);
    EXPECT_DOUBLE_EQ(g.exterior_breaks.back(), 4.0);
}

TEST(RadialGrid, ExteriorKernelIntegral) {
    const FracOrder s(0.5);
    const double R_inf = tail_bound(s, Dimension(2), 1.0, 1e-4);
    const auto g = make_radial_grid(1.0, 16, R_inf, 24, 2.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.exterior_nodes.size(); ++i)
        acc += g.exterior_weights[i] * std::pow(g.exterior_nodes[i], -2.0);
    EXPECT_NEAR(acc, 1.0 - 1.0 / R_inf, 1e-6);
}

TEST(RadialGrid, RefinementConverges) {
    auto integral = [](int n) {
        const auto g = make_radial_grid(1.0, n, 2.0, 4, 1.0, 2);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.interior_nodes.size(); ++i)
            acc += g.interior_weights[i] * std::exp(g.interior_nodes[i]) * g.interior_nodes[i];
        return std::abs(acc - 1.0);
    };
    EXPECT_LT(integral(8), integral(4));
    EXPECT_LT(integral(16), integral(8));
}

TEST(RadialGrid, RejectsBadInput) {
    EXPECT_THROW(make_radial_grid(1.0, 2, 4.0, 8, 1.0), ConstructionError);
    EXPECT_THROW(make_radial_grid(1.0, 8, 0.5, 8, 1.0), ConstructionError);
    EXPECT_THROW(make_radial_grid(-1.0, 8, 4.0, 8, 1.0), ConstructionError);
    EXPECT_THROW(make_radial_grid(1.0, 8, 4.0, 8, 0.5), ConstructionError);
    EXPECT_THROW(Ball(0.0, Dimension(2)), ConstructionError);
    EXPECT_NEAR(Ball(2.0, Dimension(2)).volume(), 4.0 * std::numbers::pi, 1e-13);
}

TEST(TailBound, MeetsToleranceAndMonotone) {
    for (double sv : {0.1, 0.5, 0.9}) {
        const FracOrder s(sv);
        double prev = 0.0;
        for (double tol = 1e-2; tol > 1e-9; tol *= 0.5) {
            const double Ri = tail_bound(s, Dimension(2), 1.0, tol);
            EXPECT_TRUE(std::isfinite(Ri));
            EXPECT_LE(tail_fraction(s, Dimension(2), 1.0, Ri), tol);
            EXPECT_GE(Ri, prev);
            prev = Ri;
        }
    }
    EXPECT_LT(tail_bound(FracOrder(0.9), Dimension(2), 1.0, 1e-6),
              tail_bound(FracOrder(0.1), Dimension(2), 1.0, 1e-6));
    EXPECT_THROW(tail_bound(FracOrder(0.5), Dimension(2), 1.0, 0.0), DomainError);
    EXPECT_THROW(tail_bound(FracOrder(0.001), Dimension(2), 1.0, 1e-300), NumericalError);
}

TEST(TailBound, FractionMatchesDirectIntegral) {
    // 4 |S^{N-1}| R^{2s} int_{R_inf}^inf r^{N-1} (r - R)^{-N-2s} dr by exp-sinh quadrature
    const double R = 1.5, Ri = 7.0;
    boost::math::quadrature::exp_sinh<double> es;
    for (int N : {2, 3})
        for (double s : {0.3, 0.8}) {
            const double acc = es.integrate([&](double t) {
                const double r = Ri + t;
                return std::pow(r, N - 1) * std::pow(r - R, -N - 2.0 * s);
            });
            const double direct = 4.0 * sphere_measure(Dimension(N)) * std::pow(R, 2.0 * s) * acc;
            EXPECT_NEAR(tail_fraction(FracOrder(s), Dimension(N), R, Ri) / direct, 1.0, 1e-10) << N << " " << s;
        }
}

TEST(PolarGrid, AngleCountChecks) {
    const auto g = make_radial_grid(1.0, 4, 2.0, 4, 1.0);
    EXPECT_THROW(PolarGrid(g, 7), ConstructionError);
    EXPECT_THROW(PolarGrid(g, 6), ConstructionError);
    PolarGrid p(g, 12);
    EXPECT_EQ(p.size(), static_cast<std::size_t>(p.rings() * 12));
    double area = 0.0;
    for (int i = 0; i < p.interior_rings(); ++i) area += p.area_weight(i) * p.n_angles;
    EXPECT_NEAR(area, std::numbers::pi, 1e-12);
}

TEST(RadialHatBasis, InterpolatesLinearExactly) {
    const auto g = make_radial_grid(1.0, 6, 2.0, 4, 2.0);
    RadialHatBasis b(g);
    const auto c = b.interpolate([](double r) { return 3.0 * r - 1.0; });
    for (double r : {0.0, 0.13, 0.5, 0.77, 0.999, 1.0}) EXPECT_NEAR(b.eval(c, r), 3.0 * r - 1.0, 1e-14);
    EXPECT_THROW(RadialHatBasis(std::vector<double>{0.0, 0.5, 0.4}), ConstructionError);
    EXPECT_THROW(RadialHatBasis(std::vector<double>{0.1, 0.5}), ConstructionError);
}
