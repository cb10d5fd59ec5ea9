#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fraflow/grid.hpp"

namespace testutil {

using fraflow::Field;
using fraflow::Grid;

// Evaluates f(x) at every grid point (x passed as a d-vector).
inline Field fill(const Grid& g,
                  const std::function<double(const std::vector<double>&)>& f) {
    Field u(g);
    std::vector<double> x(g.dim());
    if (g.dim() == 1) {
        for (int i = 0; i < g.n(); ++i) {
            x[0] = g.coord(i);
            u[static_cast<std::size_t>(i)] = f(x);
        }
    } else {
        for (int i = 0; i < g.n(); ++i)
            for (int j = 0; j < g.n(); ++j) {
                x[0] = g.coord(i);
                x[1] = g.coord(j);
                u[static_cast<std::size_t>(i) * g.n() + j] = f(x);
            }
    }
    return u;
}

inline double linf(const Field& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
    return m;
}

inline double l2(const Field& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i];
    return std::sqrt(s * a.grid.cell_volume());
}

inline double rel_l2(const Field& a, const Field& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        num += d * d;
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

inline double rel_l1(const Field& a, const Field& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::abs(a[i] - b[i]);
        den += std::abs(b[i]);
    }
    return num / den;
}

inline double rel(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Band-limited random field: a handful of low modes, reproducible.
inline Field random_smooth(const Grid& g, unsigned long long seed,
                           int modes = 5) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double w = std::acos(-1.0) / g.half_width();
    struct Mode { int k0, k1; double a, b; };
    std::vector<Mode> ms;
    for (int k0 = 0; k0 <= modes; ++k0)
        for (int k1 = (g.dim() == 2 ? -modes : 0);
             k1 <= (g.dim() == 2 ? modes : 0); ++k1)
            ms.push_back({k0, k1, gauss(rng), gauss(rng)});
    return fill(g, [&](const std::vector<double>& x) {
        double v = 0.0;
        for (const auto& mo : ms) {
            double phase = mo.k0 * w * x[0];
            if (g.dim() == 2) phase += mo.k1 * w * x[1];
            v += mo.a * std::cos(phase) + mo.b * std::sin(phase);
        }
        return v;
    });
}

// Strictly positive smooth field with analytic tails.
inline Field random_positive(const Grid& g, unsigned long long seed) {
    Field u = random_smooth(g, seed, 3);
    const double m = linf(u);
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = std::exp(0.8 * u[i] / (m > 0 ? m : 1.0));
    return u;
}

}  // namespace testutil
