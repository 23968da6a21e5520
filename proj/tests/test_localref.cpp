#include <cmath>
#include <functional>
#include <numbers>

#include <gtest/gtest.h>

#include "fracspec/localref.hpp"

using namespace fracspec;

namespace {

// independent bracketing on std::cyl_bessel_j with step 0.01
double oracle_root(const std::function<double(double)>& g, int k) {
    double a = 0.01, ga = g(a);
    int found = 0;
    for (double b = a + 0.01;; b += 0.01) {
        const double gb = g(b);
        if (ga * gb < 0.0) {
            if (++found == k) {
                double lo = b - 0.01, hi = b;
                for (int it = 0; it < 100; ++it) {
                    const double m = 0.5 * (lo + hi);
                    (g(lo) * g(m) <= 0.0 ? hi : lo) = m;
                }
                return 0.5 * (lo + hi);
            }
        }
        ga = gb;
    }
}

double theta_oracle(int l, int N, int k) {
    const double nu = l + 0.5 * (N - 2);
    return oracle_root([=](double r) { return (l / r) * std::cyl_bessel_j(nu, r) - std::cyl_bessel_j(nu + 1.0, r); }, k);
}

}  // namespace

TEST(Bessel, AgreesWithStandardLibrary) {
    EXPECT_EQ(bessel_j(0.0, 0.0), 1.0);
    EXPECT_EQ(bessel_j(2.0, 0.0), 0.0);
    EXPECT_NEAR(bessel_j(0.5, std::numbers::pi), 0.0, 1e-12);
    for (double nu : {0.0, 0.5, 1.0, 2.0, 3.5, 7.0, 12.5})
        for (double x = 0.05; x < 60.0; x += 0.173) EXPECT_NEAR(bessel_j(nu, x), std::cyl_bessel_j(nu, x), 1e-10) << nu << " " << x;
    EXPECT_THROW(bessel_j(-1.0, 1.0), DomainError);
}

TEST(ThetaRoot, KnownZeros) {
    EXPECT_NEAR(theta_root(1, Dimension(2), 1), 1.84118378, 1e-8);
    EXPECT_NEAR(theta_root(0, Dimension(2), 1), 3.83170597, 1e-8);
    EXPECT_NEAR(dirichlet_root(Dimension(2)), 2.40482556, 1e-8);
    EXPECT_NEAR(dirichlet_root(Dimension(3)), std::numbers::pi, 1e-10);
}

TEST(ThetaRoot, MatchesIndependentBisection) {
    for (int N : {2, 3, 4})
        for (int l = 0; l <= 4; ++l)
            for (int k = 1; k <= 4; ++k) {
                const double r = theta_root(l, Dimension(N), k);
                EXPECT_NEAR(r, theta_oracle(l, N, k), 1e-8 * r) << N << " " << l << " " << k;
                EXPECT_LE(std::abs(theta_fn(l, Dimension(N), r)), 1e-9);
            }
}

TEST(ThetaRoot, DipoleLowestInEveryDimension) {
    for (int N : {2, 3, 4}) {
        const double r1 = theta_root(1, Dimension(N), 1);
        for (int l = 0; l <= 10; ++l)
            if (l != 1) {
                EXPECT_LT(r1, theta_root(l, Dimension(N), 1)) << N << " " << l;
            }
        const auto sp = local_spectrum(Dimension(N), 1.0, 6);
        EXPECT_EQ(sp.neumann_values[1].l, 1);
        EXPECT_EQ(sp.neumann_values[1].multiplicity, N);
    }
}

TEST(LocalSpectrum, DiskValuesAndChain) {
    const auto sp = local_spectrum(Dimension(2), 1.0, 8);
    EXPECT_EQ(sp.neumann_values[0].mu, 0.0);
    EXPECT_NEAR(sp.first_nontrivial(), 3.38996, 1e-5);
    EXPECT_NEAR(sp.dirichlet_first, 5.78318596, 1e-7);
    for (std::size_t i = 1; i < sp.neumann_values.size(); ++i)
        EXPECT_LE(sp.neumann_values[i - 1].mu, sp.neumann_values[i].mu);
    EXPECT_TRUE(interlacing_chain_holds(sp, 0.5));
    EXPECT_TRUE(interlacing_chain_holds(sp, 0.9));
    EXPECT_THROW(interlacing_chain_holds(sp, 1.0), DomainError);
}

TEST(LocalSpectrum, Scaling) {
    const auto a = local_spectrum(Dimension(2), 1.0, 6), b = local_spectrum(Dimension(2), 2.0, 6),
               c = local_spectrum(Dimension(2), 3.0, 6);
    for (std::size_t i = 0; i < a.neumann_values.size(); ++i) {
        EXPECT_EQ(b.neumann_values[i].mu, a.neumann_values[i].mu / 4.0);
        EXPECT_NEAR(c.neumann_values[i].mu, a.neumann_values[i].mu / 9.0, 1e-15 * a.neumann_values[i].mu);
    }
}

TEST(LocalSpectrum, Multiplicities) {
    EXPECT_EQ(harmonic_multiplicity(0, Dimension(2)), 1);
    EXPECT_EQ(harmonic_multiplicity(3, Dimension(2)), 2);
    EXPECT_EQ(harmonic_multiplicity(2, Dimension(3)), 5);
    EXPECT_EQ(harmonic_multiplicity(2, Dimension(4)), 9);
    EXPECT_THROW(theta_root(-1, Dimension(2), 1), DomainError);
    EXPECT_THROW(local_spectrum(Dimension(2), 1.0, 1), DomainError);
}

TEST(LocalSpectrum, BracketingFailure) {
    EXPECT_THROW(detail::kth_root([](double) { return 1.0; }, 1, 0.05, 5.0, "constant"), NumericalError);
}
