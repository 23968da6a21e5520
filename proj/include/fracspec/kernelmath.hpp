#pragma once

/// @file kernelmath.hpp
/// Gamma function, Riesz normalization constant and the gradient-limit constant.

#include <cmath>
#include <numbers>
#include <string>

#include "fracspec/error.hpp"

namespace fracspec {

/// Fractional order s, strictly inside (0, 1).
class FracOrder {
public:
    explicit FracOrder(double s) : s_(s) {
        if (!(s > 0.0 && s < 1.0)) {
            throw DomainError("s must lie in (0,1)");
        }
    }
    double value() const noexcept { return s_; }
    operator double() const noexcept { return s_; }

private:
    double s_;
};

/// Space dimension N >= 2.
class Dimension {
public:
    explicit Dimension(int n) : n_(n) {
        if (n < 2) {
            throw DomainError("dimension must be at least 2, got " + std::to_string(n));
        }
    }
    int value() const noexcept { return n_; }
    operator int() const noexcept { return n_; }

private:
    int n_;
};

/// Euler Gamma. Throws at the poles 0, -1, -2, ...
inline double gamma_fn(double x) {
    if (x <= 0.0 && x == std::floor(x)) {
        throw DomainError("gamma_fn: pole at non-positive integer " + std::to_string(x));
    }
    return std::tgamma(x);
}

/// Surface measure of the unit sphere S^{N-1}.
inline double sphere_measure(Dimension N) {
    const double h = 0.5 * N.value();
    return 2.0 * std::pow(std::numbers::pi, h) / gamma_fn(h);
}

/// c_{N,s} = 4^s Gamma(N/2 + s) / (pi^{N/2} |Gamma(-s)|).
inline double riesz_constant(Dimension N, FracOrder s) {
    const double h = 0.5 * N.value();
    return std::pow(4.0, s.value()) * gamma_fn(h + s.value()) /
           (std::pow(std::numbers::pi, h) * std::abs(gamma_fn(-s.value())));
}

/// K_N = |S^{N-1}| / (2N), so that (1-s) [u]^2 -> K_N * int |grad u|^2.
inline double bbm_constant(Dimension N) {
    return sphere_measure(N) / (2.0 * N.value());
}

}  // namespace fracspec
