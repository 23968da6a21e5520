#pragma once

/// @file eigensolver.hpp
/// Dense symmetric-definite eigensolver for (A, M), with the zero-mean constraint
/// for l = 0 imposed by restricting to the complement of m; Courant-Fischer sampling.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracspec/assembly.hpp"
#include "fracspec/error.hpp"

namespace fracspec {

struct EigenPair {
    double mu = 0.0;
    Eigen::VectorXd vector;  ///< problem coefficients, M-normalized
    int mode = 0;
    double s = 0.5;
};

/// Orthonormal basis of the admissible subspace: complement of m for l = 0,
/// identity otherwise.
inline Eigen::MatrixXd admissible_basis(const SpectralProblem& p) {
    const int n = p.size();
    if (!p.constraint) return Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd v = *p.constraint;
    const double nm = v.norm();
    if (!(nm > 0.0)) throw ConstructionError("admissible_basis: zero constraint vector");
    v(0) += (v(0) >= 0.0 ? nm : -nm);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n) - (2.0 / v.squaredNorm()) * v * v.transpose();
    return H.rightCols(n - 1);
}

namespace detail {

inline std::vector<EigenPair> solve_pencil(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M,
                                           const Eigen::MatrixXd& Q, int k, const SpectralProblem& p) {
    const Eigen::MatrixXd Ar = Q.transpose() * A * Q;
    const Eigen::MatrixXd Mr = Q.transpose() * M * Q;
    if (Eigen::LLT<Eigen::MatrixXd>(0.5 * (Mr + Mr.transpose())).info() != Eigen::Success) {
        throw NumericalError("solve_generalized: mass matrix of mode " + std::to_string(p.mode) +
                             " is not positive definite");
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Ar + Ar.transpose()),
                                                                  0.5 * (Mr + Mr.transpose()));
    if (es.info() != Eigen::Success) {
        throw NumericalError("solve_generalized: Cholesky-based solver failed for mode " + std::to_string(p.mode) +
                             " (dimension " + std::to_string(Ar.rows()) + ", info " +
                             std::to_string(static_cast<int>(es.info())) + ")");
    }
    std::vector<EigenPair> out;
    for (int i = 0; i < k; ++i) {
        EigenPair e;
        e.mu = es.eigenvalues()(i);
        e.vector = Q * es.eigenvectors().col(i);
        e.vector /= std::sqrt(e.vector.dot(M * e.vector));
        e.mode = p.mode;
        e.s = p.s;
        if (!std::isfinite(e.mu)) throw NumericalError("solve_generalized: non-finite eigenvalue");
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace detail

/// k smallest admissible eigenpairs, ascending.
inline std::vector<EigenPair> solve_generalized(const SpectralProblem& p, int k) {
    const Eigen::MatrixXd Q = admissible_basis(p);
    if (k < 1 || k > Q.cols()) throw DomainError("solve_generalized: count must be in [1, dimension]");
    return detail::solve_pencil(p.A, p.M, Q, k, p);
}

/// k smallest eigenpairs ignoring the zero-mean constraint (exposes mu_0 for l = 0).
inline std::vector<EigenPair> solve_unconstrained(const SpectralProblem& p, int k) {
    if (k < 1 || k > p.size()) throw DomainError("solve_unconstrained: count must be in [1, dimension]");
    return detail::solve_pencil(p.A, p.M, Eigen::MatrixXd::Identity(p.size(), p.size()), k, p);
}

/// ||A v - mu M v|| / (||A|| ||v||) with the Frobenius norm.
inline double pencil_residual(const EigenPair& e, const SpectralProblem& p) {
    return (p.A * e.vector - e.mu * (p.M * e.vector)).norm() / (p.A.norm() * e.vector.norm());
}

/// max over tests v of |a(u, v) - mu m(u, v)| / (||A|| ||u|| ||v||).
inline double weak_residual(const EigenPair& e, const SpectralProblem& p, const std::vector<Eigen::VectorXd>& tests) {
    const double an = p.A.norm();
    const Eigen::VectorXd r = p.A * e.vector - e.mu * (p.M * e.vector);
    double worst = 0.0;
    for (const auto& v : tests) {
        if (v.size() != p.size()) throw ConstructionError("weak_residual: test vector size mismatch");
        worst = std::max(worst, std::abs(v.dot(r)) / (an * e.vector.norm() * v.norm()));
    }
    return worst;
}

struct MinMaxSample {
    double value = 0.0;               ///< min over trials of the max Rayleigh quotient
    double eigen_span = 0.0;          ///< trial 0: span of the first n eigenvectors
    std::vector<double> trial_maxima;
};

/// Min over random n-dimensional admissible subspaces of the max Rayleigh quotient.
inline MinMaxSample minmax_sample(const SpectralProblem& p, int n, int trials, unsigned seed = 1) {
    const Eigen::MatrixXd Q = admissible_basis(p);
    if (n < 1 || n > Q.cols()) throw DomainError("minmax_sample: n must be in [1, dimension]");
    if (trials < 1) throw DomainError("minmax_sample: need at least one trial");
    const Eigen::MatrixXd Ar = Q.transpose() * p.A * Q;
    const Eigen::MatrixXd Mr = Q.transpose() * p.M * Q;
    auto top = [&](const Eigen::MatrixXd& V) {
        const Eigen::MatrixXd a = V.transpose() * Ar * V, m = V.transpose() * Mr * V;
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()),
                                                                      0.5 * (m + m.transpose()),
                                                                      Eigen::EigenvaluesOnly);
        return es.eigenvalues()(n - 1);
    };
    MinMaxSample out;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Ar + Ar.transpose()),
                                                                  0.5 * (Mr + Mr.transpose()));
    out.eigen_span = top(es.eigenvectors().leftCols(n));
    out.trial_maxima.push_back(out.eigen_span);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int t = 1; t < trials; ++t) {
        Eigen::MatrixXd V(Q.cols(), n);
        for (int i = 0; i < V.rows(); ++i)
            for (int j = 0; j < n; ++j) V(i, j) = gauss(rng);
        out.trial_maxima.push_back(top(Eigen::HouseholderQR<Eigen::MatrixXd>(V).householderQ() *
                                       Eigen::MatrixXd::Identity(Q.cols(), n)));
    }
    out.value = *std::min_element(out.trial_maxima.begin(), out.trial_maxima.end());
    return out;
}

/// Group ascending values into clusters whose members lie within rel of the first.
inline std::vector<std::vector<int>> cluster_multiplets(const std::vector<double>& values, double rel = 1e-8) {
    std::vector<int> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
    std::vector<std::vector<int>> out;
    for (int i : order) {
        if (!out.empty()) {
            const double v0 = values[out.back().front()];
            if (std::abs(values[i] - v0) <= rel * std::max(std::abs(v0), std::abs(values[i]))) {
                out.back().push_back(i);
                continue;
            }
        }
        out.push_back({i});
    }
    return out;
}

}  // namespace fracspec
