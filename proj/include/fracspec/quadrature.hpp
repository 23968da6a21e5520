#pragma once

/// @file quadrature.hpp
/// One-dimensional rules on [0, 1]: Gauss-Legendre, Gauss-Jacobi with weight
/// t^beta, and a geometrically graded rule for integrands ~ t^beta near 0.

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracspec/error.hpp"

namespace fracspec {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

namespace detail {

inline Rule gauss_legendre_uncached(int n) {
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
    return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre on [0, 1]; cached per n.
inline const Rule& gauss_legendre(int n) {
    if (n < 1) throw ConstructionError("gauss_legendre: n must be positive");
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::gauss_legendre_uncached(n)).first;
    return it->second;
}

/// n-point Gauss rule for the weight t^beta on [0, 1], beta > -1 (Golub-Welsch).
inline Rule gauss_jacobi(int n, double beta) {
    if (n < 1) throw ConstructionError("gauss_jacobi: n must be positive");
    if (!(beta > -1.0)) throw DomainError("gauss_jacobi: beta must exceed -1");
    // Jacobi recurrence on [-1, 1] with alpha = 0, weight (1+x)^beta
    Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 0);
    for (int k = 0; k < n; ++k) {
        const double c = 2.0 * k + beta;
        diag(k) = (k == 0) ? beta / (beta + 2.0) : beta * beta / (c * (c + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double c = 2.0 * k + beta;
        const double kb = k + beta;
        sub(k - 1) = std::sqrt(4.0 * k * k * kb * kb / (c * c * (c - 1.0) * (c + 1.0)));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success) throw NumericalError("gauss_jacobi: eigensolver failed");
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // mu0 = int (1+x)^beta dx = 2^{beta+1}/(beta+1); map to [0,1] divides by 2^{beta+1}
    const double mu0 = 1.0 / (beta + 1.0);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = 0.5 * (1.0 + eig.eigenvalues()(i));
        const double v = eig.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v * v;
    }
    return rule;
}

/// Plain-integrand rule on [0, 1] for functions behaving like t^beta G(t), G smooth.
/// Geometric panels [ratio^{k+1}, ratio^k] with Gauss-Legendre, and an innermost
/// panel [0, ratio^levels] with Gauss-Jacobi absorbing t^beta.
inline Rule graded_rule(double beta, int levels, int q, double ratio = 0.2) {
    Rule rule;
    const Rule& gl = gauss_legendre(q);
    double hi = 1.0;
    for (int k = 0; k < levels; ++k) {
        const double lo = hi * ratio;
        for (std::size_t i = 0; i < gl.size(); ++i) {
            rule.nodes.push_back(lo + (hi - lo) * gl.nodes[i]);
            rule.weights.push_back((hi - lo) * gl.weights[i]);
        }
        hi = lo;
    }
    const Rule gj = gauss_jacobi(q, beta);
    for (std::size_t i = 0; i < gj.size(); ++i) {
        const double t = gj.nodes[i];
        rule.nodes.push_back(hi * t);
        rule.weights.push_back(hi * gj.weights[i] / std::pow(t, beta));
    }
    return rule;
}

/// Breakpoints of geometric panels [0, h0, 2 h0, 4 h0, ...] capped at len.
inline std::vector<double> doubling_breaks(double h0, double len, double factor = 2.0) {
    std::vector<double> b{0.0};
    if (!(h0 > 0.0) || h0 >= len) {
        b.push_back(len);
        return b;
    }
    double x = h0;
    while (x < len) {
        b.push_back(x);
        x *= factor;
    }
    if (len - b.back() < 0.25 * (b.back() - b[b.size() - 2]) && b.size() > 2) b.back() = len;
    else b.push_back(len);
    return b;
}

}  // namespace fracspec
