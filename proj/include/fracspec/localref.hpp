#pragma once

/// @file localref.hpp
/// Local (s = 1) Neumann spectrum of the ball from Bessel roots, the first Dirichlet
/// eigenvalue, and the chain mu_1 < lambda_1(B) < lambda_1(B_r).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fracspec/error.hpp"
#include "fracspec/kernelmath.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

/// Bessel function of the first kind J_nu(x), nu >= 0, x >= 0.
/// Ascending series in long double for x <= 20, Schlaefli's integral beyond.
inline double bessel_j(double nu, double x) {
    if (nu < 0.0 || x < 0.0) throw DomainError("bessel_j: requires nu >= 0 and x >= 0");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    if (x <= 20.0) {
        const long double h = 0.5L * x, h2 = h * h;
        long double term = std::exp(static_cast<long double>(nu) * std::log(h) - std::lgamma(static_cast<long double>(nu) + 1.0L));
        long double sum = term;
        for (int k = 1; k < 500; ++k) {
            term *= -h2 / (static_cast<long double>(k) * (k + nu));
            sum += term;
            if (k > x && std::abs(term) < 1e-22L * std::abs(sum)) break;
        }
        return static_cast<double>(sum);
    }
    const double pi = std::numbers::pi;
    const Rule& gl = gauss_legendre(16);
    const int panels = 8 + static_cast<int>(std::ceil(x / 2.0));
    double a = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = pi * p / panels, hw = pi / panels;
        for (std::size_t i = 0; i < gl.size(); ++i) {
            const double t = lo + hw * gl.nodes[i];
            a += hw * gl.weights[i] * std::cos(nu * t - x * std::sin(t));
        }
    }
    a /= pi;
    const double sn = std::sin(nu * pi);
    if (std::abs(sn) > 1e-15) {
        const double T = std::asinh(60.0 / x);
        double b = 0.0;
        for (int p = 0; p < 8; ++p) {
            const double lo = T * p / 8.0, hw = T / 8.0;
            for (std::size_t i = 0; i < gl.size(); ++i) {
                const double t = lo + hw * gl.nodes[i];
                b += hw * gl.weights[i] * std::exp(-x * std::sinh(t) - nu * t);
            }
        }
        a -= sn / pi * b;
    }
    return a;
}

/// Theta_l(r) = d/dr (r^{-m} J_{l+m}(r)), m = (N-2)/2, written as
/// r^{-m} ((l/r) J_{l+m}(r) - J_{l+m+1}(r)).
inline double theta_fn(int l, Dimension N, double r) {
    if (!(r > 0.0)) throw DomainError("theta_fn: r must be positive");
    const double m = 0.5 * (N.value() - 2);
    const double nu = l + m;
    return std::pow(r, -m) * ((l / r) * bessel_j(nu, r) - bessel_j(nu + 1.0, r));
}

namespace detail {

/// k-th sign change of g on (start, inf) by a 0.1 scan, refined by bisection.
template <class G>
double kth_root(G&& g, int k, double start, double limit, const std::string& what) {
    double a = start, ga = g(a);
    int found = 0;
    for (double b = a + 0.1; b < limit; b += 0.1) {
        const double gb = g(b);
        if ((ga < 0.0) != (gb < 0.0) || gb == 0.0) {
            if (++found == k) {
                double lo = a, hi = b, glo = ga;
                while (hi - lo > 1e-12) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = g(mid);
                    if ((gm < 0.0) == (glo < 0.0) && gm != 0.0) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        a = b;
        ga = gb;
    }
    throw NumericalError("bracketing failed for " + what);
}

}  // namespace detail

/// k-th positive root of Theta_l.
inline double theta_root(int l, Dimension N, int k) {
    if (l < 0 || k < 1) throw DomainError("theta_root: need l >= 0 and k >= 1");
    const double m = 0.5 * (N.value() - 2);
    const double nu = l + m;
    auto g = [&](double r) { return (l / r) * bessel_j(nu, r) - bessel_j(nu + 1.0, r); };
    return detail::kth_root(g, k, 0.05, nu + 8.0 * (k + 4) + 50.0,
                            "theta_root(l=" + std::to_string(l) + ", k=" + std::to_string(k) + ")");
}

/// First positive zero of J_{N/2-1}.
inline double dirichlet_root(Dimension N) {
    const double nu = 0.5 * N.value() - 1.0;
    return detail::kth_root([&](double r) { return bessel_j(nu, r); }, 1, 0.05, nu + 60.0, "dirichlet_root");
}

/// Dimension of degree-l spherical harmonics in R^N.
inline int harmonic_multiplicity(int l, Dimension N) {
    auto binom = [](int n, int k) {
        if (k < 0 || n < k) return 0.0;
        double b = 1.0;
        for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
        return b;
    };
    const int n = N.value();
    return static_cast<int>(std::lround(binom(l + n - 1, n - 1) - binom(l + n - 3, n - 1)));
}

struct LocalEigenvalue {
    double mu = 0.0;
    double root = 0.0;
    int l = 0;
    int k = 0;  ///< 0 for the constant mode
    int multiplicity = 1;
};

struct LocalSpectrum {
    std::vector<LocalEigenvalue> neumann_values;  ///< ascending, starts with mu_0 = 0
    double dirichlet_first = 0.0;
    double R = 1.0;
    int N = 2;

    double first_nontrivial() const { return neumann_values.at(1).mu; }
};

/// Lowest `count` Neumann levels (including mu_0 = 0) of the ball of radius R.
inline LocalSpectrum local_spectrum(Dimension N, double R, int count) {
    if (count < 2) throw DomainError("local_spectrum: count must be at least 2");
    if (!(R > 0.0)) throw DomainError("local_spectrum: R must be positive");
    std::vector<LocalEigenvalue> all{{0.0, 0.0, 0, 0, 1}};
    for (int l = 0;; ++l) {
        const double first = theta_root(l, N, 1);
        if (static_cast<int>(all.size()) >= count) {
            std::vector<double> mus;
            for (const auto& e : all) mus.push_back(e.mu);
            std::nth_element(mus.begin(), mus.begin() + (count - 1), mus.end());
            if (first * first / (R * R) > mus[count - 1]) break;
        }
        for (int k = 1; k <= count; ++k) {
            const double root = k == 1 ? first : theta_root(l, N, k);
            all.push_back({root * root / (R * R), root, l, k, harmonic_multiplicity(l, N)});
        }
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.mu < b.mu; });
    all.resize(count);
    LocalSpectrum out;
    out.neumann_values = std::move(all);
    const double j = dirichlet_root(N);
    out.dirichlet_first = j * j / (R * R);
    out.R = R;
    out.N = N.value();
    return out;
}

/// mu_1(B) < lambda_1(B) < lambda_1(B_r) for a concentric ball of radius r < R.
inline bool interlacing_chain_holds(const LocalSpectrum& sp, double r) {
    if (!(r > 0.0 && r < sp.R)) throw DomainError("interlacing_chain_holds: need 0 < r < R");
    const double inner = sp.dirichlet_first * (sp.R / r) * (sp.R / r);
    return sp.first_nontrivial() < sp.dirichlet_first && sp.dirichlet_first < inner;
}

}  // namespace fracspec
