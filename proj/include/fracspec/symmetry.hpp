#pragma once

/// @file symmetry.hpp
/// Polarization across hyperplanes through the origin, the discrete seminorm,
/// foliated Schwarz and nodal-domain checks, and classification of an eigenspace
/// into radial and antisymmetric members.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracspec/eigensolver.hpp"
#include "fracspec/error.hpp"
#include "fracspec/extension.hpp"
#include "fracspec/geometry.hpp"

namespace fracspec {

/// Unit vector in the plane.
struct Direction {
    double x = 1.0;
    double y = 0.0;

    Direction() = default;
    Direction(double ex, double ey) : x(ex), y(ey) {
        if (std::abs(std::hypot(x, y) - 1.0) > 1e-12) throw DomainError("Direction: vector must have unit length");
    }
    static Direction from_angle(double a) { return {std::cos(a), std::sin(a)}; }
    double angle() const { return std::atan2(y, x); }
};

/// Values at every node of a polar grid, interior rings first.
struct SampledField {
    PolarGrid grid;
    std::vector<double> values;

    SampledField(PolarGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.size()) throw ConstructionError("SampledField: value count does not match grid");
    }
    double at(int ring, int a) const { return values[grid.index(ring, a)]; }
    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

inline SampledField sample_field(const PolarGrid& g, const PolarFunction& f) {
    std::vector<double> v(g.size());
    for (int i = 0; i < g.rings(); ++i)
        for (int a = 0; a < g.n_angles; ++a) v[g.index(i, a)] = f(g.ring_radius(i), g.angle(a));
    return SampledField(g, std::move(v));
}

inline SampledField from_extended(const ExtendedFunction& v) {
    const PolarGrid& g = v.interior.grid;
    std::vector<double> vals(g.size());
    for (int i = 0; i < g.rings(); ++i)
        for (int a = 0; a < g.n_angles; ++a) vals[g.index(i, a)] = v.node_value(i, a);
    return SampledField(g, std::move(vals));
}

/// Angle-index permutation a -> a' of the reflection sigma_e(x) = x - 2 (x.e) e.
inline std::vector<int> reflection_map(const PolarGrid& g, const Direction& e) {
    const double shift = (2.0 * e.angle() + std::numbers::pi) * g.n_angles / (2.0 * std::numbers::pi);
    const double k = std::round(shift);
    if (std::abs(shift - k) > 1e-9) throw ConstructionError("reflection does not map grid nodes to grid nodes");
    const int ki = static_cast<int>(k);
    std::vector<int> m(g.n_angles);
    for (int a = 0; a < g.n_angles; ++a) m[a] = ((ki - a) % g.n_angles + g.n_angles) % g.n_angles;
    return m;
}

inline SampledField reflect(const SampledField& u, const Direction& e) {
    const auto m = reflection_map(u.grid, e);
    std::vector<double> v(u.values.size());
    for (int i = 0; i < u.grid.rings(); ++i)
        for (int a = 0; a < u.grid.n_angles; ++a) v[u.grid.index(i, a)] = u.at(i, m[a]);
    return SampledField(u.grid, std::move(v));
}

/// P_e u = min(u, u o sigma_e) on {x.e > 0}, max on {x.e < 0}, u on H_e.
inline SampledField polarize(const SampledField& u, const Direction& e) {
    const auto m = reflection_map(u.grid, e);
    const double be = e.angle();
    std::vector<double> v(u.values.size());
    for (int a = 0; a < u.grid.n_angles; ++a) {
        const double side = std::cos(u.grid.angle(a) - be);
        for (int i = 0; i < u.grid.rings(); ++i) {
            const double here = u.at(i, a), there = u.at(i, m[a]);
            double out = here;
            if (m[a] != a) out = side > 0.0 ? std::min(here, there) : std::max(here, there);
            v[u.grid.index(i, a)] = out;
        }
    }
    return SampledField(u.grid, std::move(v));
}

/// int_B u^2 and int_B u on the interior nodes.
inline double l2_norm_sq(const SampledField& u) {
    double acc = 0.0;
    for (int i = 0; i < u.grid.interior_rings(); ++i)
        for (int a = 0; a < u.grid.n_angles; ++a) acc += u.grid.area_weight(i) * u.at(i, a) * u.at(i, a);
    return acc;
}
inline double integral_b(const SampledField& u) {
    double acc = 0.0;
    for (int i = 0; i < u.grid.interior_rings(); ++i)
        for (int a = 0; a < u.grid.n_angles; ++a) acc += u.grid.area_weight(i) * u.at(i, a);
    return acc;
}

/// Node-pair quadrature of the seminorm over R^4 minus (B^c)^2; coincident nodes skipped.
/// Weights are cached so repeated evaluation on one grid costs one pass over pairs.
class DiscreteSeminorm {
public:
    DiscreteSeminorm(const PolarGrid& g, FracOrder s) : ni_(g.interior_size()), n_(g.size()) {
        std::vector<double> px(n_), py(n_), w(n_);
        for (int i = 0; i < g.rings(); ++i)
            for (int a = 0; a < g.n_angles; ++a) {
                const std::size_t k = g.index(i, a);
                px[k] = g.ring_radius(i) * std::cos(g.angle(a));
                py[k] = g.ring_radius(i) * std::sin(g.angle(a));
                w[k] = g.area_weight(i);
            }
        W_.assign(ni_ * n_, 0.0);
        for (std::size_t i = 0; i < ni_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                if (i == j) continue;
                const double k = std::pow((px[i] - px[j]) * (px[i] - px[j]) + (py[i] - py[j]) * (py[i] - py[j]), -1.0 - s.value());
                W_[i * n_ + j] = (j < ni_ ? 1.0 : 2.0) * w[i] * w[j] * k;
            }
    }
    double operator()(const SampledField& u) const {
        if (u.values.size() != n_) throw ConstructionError("DiscreteSeminorm: grid mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < ni_; ++i) {
            const double ui = u.values[i];
            const double* row = W_.data() + i * n_;
            double part = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                const double d = ui - u.values[j];
                part += row[j] * d * d;
            }
            acc += part;
        }
        return acc;
    }

private:
    std::size_t ni_, n_;
    std::vector<double> W_;
};

inline double seminorm_discrete(const SampledField& u, FracOrder s) { return DiscreteSeminorm(u.grid, s)(u); }

/// (a-c)^2 - (b-c)^2 - (a-d)^2 + (b-d)^2, checked against 2 (b-a)(c-d).
inline double four_point_identity(double a, double b, double c, double d) {
    const double lhs = (a - c) * (a - c) - (b - c) * (b - c) - (a - d) * (a - d) + (b - d) * (b - d);
    const double rhs = 2.0 * (b - a) * (c - d);
    const double scale = std::max({1.0, a * a, b * b, c * c, d * d});
    if (std::abs(lhs - rhs) > 1e-12 * 8.0 * scale) throw NumericalError("four_point_identity: expressions disagree");
    return lhs;
}

namespace detail {

/// Trigonometric interpolant of equispaced ring samples.
class RingInterpolant {
public:
    explicit RingInterpolant(std::span<const double> g) : m_(static_cast<int>(g.size())), c_(m_ / 2 + 1) {
        for (int k = 0; k <= m_ / 2; ++k) {
            std::complex<double> acc = 0.0;
            for (int a = 0; a < m_; ++a) acc += g[a] * std::polar(1.0, -2.0 * std::numbers::pi * k * a / m_);
            c_[k] = acc / static_cast<double>(m_);
        }
    }
    double operator()(double phi) const {
        double v = c_[0].real();
        for (int k = 1; k < m_ / 2; ++k) v += 2.0 * (c_[k] * std::polar(1.0, k * phi)).real();
        v += c_[m_ / 2].real() * std::cos(0.5 * m_ * phi);
        return v;
    }

private:
    int m_;
    std::vector<std::complex<double>> c_;
};

}  // namespace detail

/// True when every ring profile is even about the angle of p and nonincreasing in
/// the angular distance to p, both within tol relative to max |u|.
inline bool foliated_schwarz_check(const SampledField& u, const Direction& p, double tol) {
    const double scale = std::max(u.max_abs(), 1e-300);
    const double phi = p.angle();
    const int steps = 2 * u.grid.n_angles;
    std::vector<double> ring(u.grid.n_angles);
    for (int i = 0; i < u.grid.rings(); ++i) {
        for (int a = 0; a < u.grid.n_angles; ++a) ring[a] = u.at(i, a);
        const detail::RingInterpolant g(ring);
        double prev = g(phi);
        for (int j = 1; j <= steps; ++j) {
            const double al = std::numbers::pi * j / steps;
            const double plus = g(phi + al), minus = g(phi - al);
            if (std::abs(plus - minus) > tol * scale) return false;
            if (plus > prev + tol * scale) return false;
            prev = plus;
        }
    }
    return true;
}

/// Normalized first angular Fourier moment on the interior ring nearest R/2; e_1 if none.
inline Direction schwarz_direction(const SampledField& u) {
    const PolarGrid& g = u.grid;
    int best = 0;
    for (int i = 0; i < g.interior_rings(); ++i)
        if (std::abs(g.ring_radius(i) - 0.5 * g.radial.R) < std::abs(g.ring_radius(best) - 0.5 * g.radial.R)) best = i;
    double cx = 0.0, cy = 0.0;
    for (int a = 0; a < g.n_angles; ++a) {
        cx += u.at(best, a) * std::cos(g.angle(a));
        cy += u.at(best, a) * std::sin(g.angle(a));
    }
    const double n = std::hypot(cx, cy);
    if (!(n > 1e-12 * std::max(u.max_abs(), 1e-300) * g.n_angles)) return {};
    return {cx / n, cy / n};
}

/// Connected components of {u > tol} and of {u < -tol} over the interior nodes,
/// neighbours along rings (periodic) and across adjacent rings.
inline int nodal_domains(const SampledField& u, double zero_tol) {
    const PolarGrid& g = u.grid;
    const int nr = g.interior_rings(), na = g.n_angles;
    bool any = false;
    for (std::size_t k = 0; k < g.interior_size(); ++k) any = any || std::abs(u.values[k]) > zero_tol;
    if (!any) throw DomainError("nodal_domains: numerically zero field");
    std::vector<int> label(g.interior_size(), 0);
    auto sign = [&](std::size_t k) { return u.values[k] > zero_tol ? 1 : (u.values[k] < -zero_tol ? -1 : 0); };
    int count = 0;
    for (std::size_t start = 0; start < g.interior_size(); ++start) {
        const int sg = sign(start);
        if (sg == 0 || label[start]) continue;
        label[start] = ++count;
        std::queue<std::size_t> q;
        q.push(start);
        while (!q.empty()) {
            const std::size_t k = q.front();
            q.pop();
            const int i = static_cast<int>(k / na), a = static_cast<int>(k % na);
            const int nb[4][2] = {{i, (a + 1) % na}, {i, (a + na - 1) % na}, {i - 1, a}, {i + 1, a}};
            for (const auto& p : nb) {
                if (p[0] < 0 || p[0] >= nr) continue;
                const std::size_t kk = g.index(p[0], p[1]);
                if (!label[kk] && sign(kk) == sg) {
                    label[kk] = count;
                    q.push(kk);
                }
            }
        }
    }
    return count;
}

enum class Parity { Cos, Sin };

/// One member of an eigenspace: the eigenpair, its angular factor and its samples.
struct MultipletMember {
    EigenPair pair;
    Parity parity = Parity::Cos;
    SampledField field;
};

enum class Verdict { AllRadial, Mixed, AllAntisymmetric };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::AllRadial: return "all-radial";
        case Verdict::Mixed: return "mixed";
        default: return "all-antisymmetric";
    }
}

struct SymmetryReport {
    double eigenvalue = 0.0;
    int dimension = 0;
    int radial_count = 0;
    std::vector<Direction> antisym_axes;      ///< normal of the hyperplane per antisymmetric member
    std::vector<int> nodal_counts;            ///< per antisymmetric member
    std::vector<Direction> schwarz_directions;
    std::vector<bool> schwarz_ok;
    Verdict verdict = Verdict::AllRadial;
    double s = 0.5;

    int antisymmetric_count() const { return static_cast<int>(antisym_axes.size()); }
    nlohmann::json to_json() const {
        nlohmann::json j;
        j["s"] = s;
        j["eigenvalue"] = eigenvalue;
        j["dimension"] = dimension;
        j["radial_count"] = radial_count;
        j["antisymmetric_count"] = antisymmetric_count();
        j["antisym_axes"] = nlohmann::json::array();
        for (const auto& d : antisym_axes) j["antisym_axes"].push_back({d.x, d.y});
        j["nodal_counts"] = nodal_counts;
        j["schwarz_directions"] = nlohmann::json::array();
        for (const auto& d : schwarz_directions) j["schwarz_directions"].push_back({d.x, d.y});
        j["schwarz_ok"] = schwarz_ok;
        j["verdict"] = to_string(verdict);
        return j;
    }
};

/// Relative L2(B) norm of u + u o sigma_e.
inline double antisymmetry_defect(const SampledField& u, const Direction& e) {
    const SampledField r = reflect(u, e);
    std::vector<double> sum(u.values.size());
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = u.values[k] + r.values[k];
    return std::sqrt(l2_norm_sq(SampledField(u.grid, std::move(sum))) / l2_norm_sq(u));
}

/// Split an equal-eigenvalue multiplet into radial and antisymmetric members.
inline SymmetryReport classify_eigenspace(const std::vector<MultipletMember>& members, FracOrder s,
                                          double cluster_tol = 1e-8, double antisym_tol = 1e-6) {
    if (members.empty()) throw DomainError("classify_eigenspace: empty multiplet");
    SymmetryReport rep;
    rep.s = s.value();
    rep.dimension = static_cast<int>(members.size());
    double mean = 0.0;
    for (const auto& m : members) mean += m.pair.mu / members.size();
    rep.eigenvalue = mean;
    const Direction axes[2] = {{1.0, 0.0}, {0.0, 1.0}};
    std::vector<std::vector<const SampledField*>> per_axis(2);
    for (const auto& m : members) {
        if (std::abs(m.pair.mu - mean) > cluster_tol * std::abs(mean)) {
            throw NumericalError("classify_eigenspace: inconsistent multiplet, eigenvalues differ beyond the cluster tolerance");
        }
        if (m.pair.mode == 0) {
            ++rep.radial_count;
            continue;
        }
        if (m.pair.mode != 1) {
            throw NumericalError("classify_eigenspace: inconsistent multiplet, member with angular mode " +
                                 std::to_string(m.pair.mode) + " is neither radial nor antisymmetric");
        }
        int axis = -1;
        for (int k = 0; k < 2; ++k)
            if (antisymmetry_defect(m.field, axes[k]) <= antisym_tol) axis = k;
        if (axis < 0) throw NumericalError("classify_eigenspace: mode-1 member is not antisymmetric across a coordinate hyperplane");
        rep.antisym_axes.push_back(axes[axis]);
        per_axis[axis].push_back(&m.field);
        rep.nodal_counts.push_back(nodal_domains(m.field, 1e-6 * m.field.max_abs()));
        const Direction p = schwarz_direction(m.field);
        rep.schwarz_directions.push_back(p);
        rep.schwarz_ok.push_back(foliated_schwarz_check(m.field, p, 1e-6));
    }
    for (const auto& group : per_axis) {
        // at most one antisymmetric member per hyperplane up to scaling
        for (std::size_t i = 0; i < group.size(); ++i)
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                double gij = 0.0;
                const PolarGrid& g = group[i]->grid;
                for (int r = 0; r < g.interior_rings(); ++r)
                    for (int a = 0; a < g.n_angles; ++a) gij += g.area_weight(r) * group[i]->at(r, a) * group[j]->at(r, a);
                const double c = gij * gij / (l2_norm_sq(*group[i]) * l2_norm_sq(*group[j]));
                if (1.0 - c > 1e-6) {
                    throw NumericalError("classify_eigenspace: two independent members antisymmetric across the same hyperplane");
                }
            }
    }
    const int anti = rep.antisymmetric_count();
    rep.verdict = anti == 0 ? Verdict::AllRadial : (rep.radial_count == 0 ? Verdict::AllAntisymmetric : Verdict::Mixed);
    return rep;
}

}  // namespace fracspec
