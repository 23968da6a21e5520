#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fracspec/assembly.hpp"
#include "fracspec/eigensolver.hpp"

using namespace fracspec;

namespace {

SpectralProblem hand_problem(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M) {
    SpectralProblem p;
    p.A = A;
    p.M = M;
    for (int i = 0; i < A.rows(); ++i) p.dofs.push_back(i);
    return p;
}

SpectralProblem disk_problem(int l, double s, int n = 8) {
    const auto g = make_radial_grid(1.0, n, tail_bound(FracOrder(s), Dimension(2), 1.0, 1e-6), 12, 2.0);
    return assemble_mode_problem(l, FracOrder(s), g);
}

std::vector<Eigen::VectorXd> random_tests(int dim, int count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<Eigen::VectorXd> out;
    for (int t = 0; t < count; ++t) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = nd(rng);
        out.push_back(v);
    }
    return out;
}

}  // namespace

TEST(Eigensolver, HandPencil) {
    Eigen::MatrixXd A(3, 3), M(3, 3);
    A << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    M << 2, 0, 0, 0, 2, 0, 0, 0, 2;
    const auto e = solve_generalized(hand_problem(A, M), 3);
    const double r2 = std::sqrt(2.0);
    EXPECT_NEAR(e[0].mu, (2 - r2) / 2, 1e-14);
    EXPECT_NEAR(e[1].mu, 1.0, 1e-14);
    EXPECT_NEAR(e[2].mu, (2 + r2) / 2, 1e-14);
    for (const auto& x : e) EXPECT_NEAR(x.vector.dot(M * x.vector), 1.0, 1e-14);
    EXPECT_THROW(solve_generalized(hand_problem(A, M), 4), DomainError);
    EXPECT_THROW(solve_generalized(hand_problem(A, M), 0), DomainError);
}

TEST(Eigensolver, NonPositiveMassIsNumericalError) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
    EXPECT_THROW(solve_generalized(hand_problem(A, -A), 1), NumericalError);
}

TEST(Eigensolver, ZeroModeIsConstant) {
    for (double s : {0.25, 0.5, 0.75, 0.95}) {
        const auto p = disk_problem(0, s);
        const auto z = solve_unconstrained(p, 1).front();
        const double mu1 = solve_generalized(p, 1).front().mu;
        EXPECT_LE(std::abs(z.mu), 1e-8 * mu1) << s;
        const Eigen::VectorXd c = Eigen::VectorXd::Constant(p.size(), z.vector.mean());
        EXPECT_LE((z.vector - c).norm(), 1e-6 * c.norm()) << s;
    }
}

TEST(Eigensolver, AdmissiblePairsAreMeanZeroAndOrthonormal) {
    const auto p = disk_problem(0, 0.6);
    const auto e = solve_generalized(p, 4);
    for (std::size_t i = 0; i < e.size(); ++i) {
        EXPECT_LE(std::abs(p.constraint->dot(e[i].vector)), 1e-12 * p.constraint->norm() * e[i].vector.norm());
        for (std::size_t j = 0; j < e.size(); ++j)
            EXPECT_NEAR(e[i].vector.dot(p.M * e[j].vector), i == j ? 1.0 : 0.0, 1e-10);
        if (i) {
            EXPECT_LE(e[i - 1].mu, e[i].mu);
        }
        EXPECT_GE(e[i].mu, -1e-10 * p.A.norm());
    }
}

TEST(Eigensolver, Residuals) {
    for (int l : {0, 1, 2}) {
        const auto p = disk_problem(l, 0.5);
        const auto e = solve_generalized(p, 3);
        const auto tests = random_tests(p.size(), 50, 7);
        for (const auto& x : e) {
            EXPECT_LE(pencil_residual(x, p), 1e-8);
            EXPECT_LE(weak_residual(x, p, tests), 1e-8);
        }
        EigenPair noisy = e[0];
        std::mt19937_64 rng(9);
        std::normal_distribution<double> nd(0.0, 0.01);
        for (int i = 0; i < noisy.vector.size(); ++i) noisy.vector(i) *= 1.0 + nd(rng);
        EXPECT_GT(weak_residual(noisy, p, tests), 1e-4) << l;
    }
    const auto p0 = disk_problem(0, 0.5);
    EXPECT_LE(weak_residual(solve_unconstrained(p0, 1).front(), p0, random_tests(p0.size(), 50, 8)), 1e-8);
}

TEST(Eigensolver, DipoleBelowRadialNearOne) {
    const double mu0 = solve_generalized(disk_problem(0, 0.95), 1).front().mu;
    const double mu1 = solve_generalized(disk_problem(1, 0.95), 1).front().mu;
    EXPECT_LT(mu1, mu0);
}

TEST(MinMax, NeverBelowEigenvalueAndAttained) {
    const auto p = disk_problem(1, 0.5, 20);
    ASSERT_EQ(p.size(), 20);
    const auto e = solve_generalized(p, 3);
    for (int n = 1; n <= 3; ++n) {
        const auto mm = minmax_sample(p, n, 500, 42 + n);
        EXPECT_NEAR(mm.eigen_span, e[n - 1].mu, 1e-10 * e[n - 1].mu);
        for (double t : mm.trial_maxima) EXPECT_GE(t, e[n - 1].mu - 1e-10);
        EXPECT_NEAR(mm.value, e[n - 1].mu, 1e-10 * e[n - 1].mu);
    }
    EXPECT_NEAR(minmax_sample(p, 2, 1).value, e[1].mu, 1e-10 * e[1].mu);
    EXPECT_THROW(minmax_sample(p, 0, 5), DomainError);
    EXPECT_THROW(minmax_sample(p, 2, 0), DomainError);
}

TEST(MinMax, RandomSearchOnSmallProblem) {
    const auto p = disk_problem(1, 0.5, 10);
    const double mu1 = solve_generalized(p, 1).front().mu;
    const auto mm = minmax_sample(p, 1, 10000, 5);
    double best_random = INFINITY;
    for (std::size_t i = 1; i < mm.trial_maxima.size(); ++i) best_random = std::min(best_random, mm.trial_maxima[i]);
    EXPECT_GE(best_random, mu1 - 1e-10);
    RecordProperty("best_random_over_mu1", std::to_string(best_random / mu1));
}

TEST(Clusters, GroupsNearlyEqualValues) {
    const auto c = cluster_multiplets({3.0, 1.0, 1.0 + 1e-12, 2.0, 3.0 - 1e-11});
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0], (std::vector<int>{1, 2}));
    EXPECT_EQ(c[1], (std::vector<int>{3}));
    EXPECT_EQ(c[2].size(), 2u);
}
