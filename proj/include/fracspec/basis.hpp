#pragma once

/// @file basis.hpp
/// Continuous piecewise-linear hat functions on the interior cells of a radial grid.

#include <algorithm>
#include <span>
#include <vector>

#include "fracspec/error.hpp"
#include "fracspec/geometry.hpp"

namespace fracspec {

class RadialHatBasis {
public:
    explicit RadialHatBasis(std::vector<double> breaks) : breaks_(std::move(breaks)) {
        if (breaks_.size() < 2) throw ConstructionError("RadialHatBasis: need at least one cell");
        for (std::size_t i = 1; i < breaks_.size(); ++i) {
            if (!(breaks_[i] > breaks_[i - 1])) throw ConstructionError("RadialHatBasis: breaks must increase");
        }
        if (breaks_.front() != 0.0) throw ConstructionError("RadialHatBasis: first break must be 0");
    }
    explicit RadialHatBasis(const RadialGrid& g) : RadialHatBasis(g.interior_breaks) {}

    int cells() const { return static_cast<int>(breaks_.size()) - 1; }
    int nodes() const { return static_cast<int>(breaks_.size()); }
    double R() const { return breaks_.back(); }
    double node(int i) const { return breaks_[i]; }
    double width(int c) const { return breaks_[c + 1] - breaks_[c]; }
    const std::vector<double>& breaks() const { return breaks_; }

    int cell_of(double r) const {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
        int c = static_cast<int>(it - breaks_.begin()) - 1;
        return std::clamp(c, 0, cells() - 1);
    }
    /// Interpolant value at r in [0, R] for nodal coefficients.
    double eval(std::span<const double> coef, double r) const {
        const int c = cell_of(r);
        const double t = (r - breaks_[c]) / width(c);
        return (1.0 - t) * coef[c] + t * coef[c + 1];
    }
    /// Nodal interpolation of f.
    template <class F>
    std::vector<double> interpolate(F&& f) const {
        std::vector<double> c(breaks_.size());
        for (std::size_t i = 0; i < breaks_.size(); ++i) c[i] = f(breaks_[i]);
        return c;
    }

private:
    std::vector<double> breaks_;
};

}  // namespace fracspec
