// grid.hpp -- circle functions sampled on a uniform grid.
//
// GridFunction is the numeric carrier for observables, densities and
// transfer-operator images. Interpolation is circular piecewise-linear,
// which preserves positivity and min/max bounds.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "randeq/circle.hpp"

namespace randeq {

struct GridFunction {
    int n = 0;
    std::vector<double> values;

    GridFunction() = default;

    explicit GridFunction(int grid_n, double fill = 0.0)
        : n(grid_n), values(static_cast<std::size_t>(grid_n), fill) {
        check_size();
    }

    GridFunction(int grid_n, const std::function<double(double)>& f) : n(grid_n) {
        check_size();
        values.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            values[static_cast<std::size_t>(i)] = f(node(i));
    }

    void check_size() const {
        if (n < 2) throw std::invalid_argument("GridFunction: grid size must be >= 2");
    }

    double node(int i) const { return static_cast<double>(i) / n; }

    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }

    // Circular piecewise-linear interpolation; exact at nodes.
    double interp(double x) const {
        double u = wrap01(x) * n;
        int i = static_cast<int>(u);
        if (i >= n) i = n - 1;
        double frac = u - i;
        double a = values[static_cast<std::size_t>(i)];
        double b = values[static_cast<std::size_t>((i + 1) % n)];
        return a + frac * (b - a);
    }

    double min() const { return *std::min_element(values.begin(), values.end()); }
    double max() const { return *std::max_element(values.begin(), values.end()); }

    double mean() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s / n;
    }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    GridFunction& scale(double a) {
        for (double& v : values) v *= a;
        return *this;
    }
};

inline GridFunction constant_grid(int n, double c) { return GridFunction(n, c); }

// Weighted dot product of grid values against a weight vector (e.g. nu).
inline double weighted_sum(const GridFunction& g, const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != g.n)
        throw std::invalid_argument("weighted_sum: weight size mismatch");
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) s += w[static_cast<std::size_t>(i)] * g[i];
    return s;
}

} // namespace randeq
