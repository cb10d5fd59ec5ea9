#include "fraflow/rps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fraflow/reduce.hpp"
#include "fraflow/spectral.hpp"

namespace fraflow {

namespace {

void require_positive(const Field& u, double floor_rel, const char* where) {
    double umax = *std::max_element(u.v.begin(), u.v.end());
    double umin = *std::min_element(u.v.begin(), u.v.end());
    if (!(umax > 0.0) || umin < floor_rel * umax)
        throw std::domain_error(std::string(where) +
                                ": field must be strictly positive (min/max = " +
                                std::to_string(umin / std::max(umax, 1e-300)) + ")");
}

double rel_gap(double lhs, double rhs) {
    double den = std::max(std::abs(lhs), std::abs(rhs));
    if (den == 0.0) return 0.0;
    return std::abs(lhs - rhs) / den;
}

// Everything the identity chain needs at one positive field.
struct Terms {
    double t_mix;  // int u^(m-1) lap f |grad f|^2/f
    double t_h;    // int u^(m-1) Hf:(grad f x grad f)/f
    double t_4;    // int u^(m-1) |grad f|^4/f^2
    double t_hh;   // int u^(m-1) |Hf|^2
    double t_dd;   // int u^(m-1) (lap f)^2
    double first_square;
    double completed_square;
    double remainder_int;  // int u^(m-1) |Lf - Mf/(2m-1)|^2
    double entropy;
    double fisher;
    double min_u;
    double boundary_frac;
};

Terms compute_terms(const Field& u, double m, int d) {
    const Grid& g = u.grid;
    const std::size_t n = u.size();
    Field f(g);
    std::vector<double> um1(n), umm(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.v[i] = std::pow(u.v[i], m - 0.5);
        um1[i] = std::pow(u.v[i], m - 1.0);
        umm[i] = std::pow(u.v[i], m);
    }
    VectorField gf = gradient(f);
    MatrixField H = hessian(f);

    std::vector<double> lap(n), g2(n), hgg(n), hh(n);
    if (d == 1) {
        const auto& h00 = H.comp[0];
        for (std::size_t i = 0; i < n; ++i) {
            lap[i] = h00[i];
            g2[i] = gf.comp[0][i] * gf.comp[0][i];
            hgg[i] = h00[i] * g2[i];
            hh[i] = h00[i] * h00[i];
        }
    } else {
        const auto& h00 = H.comp[0];
        const auto& h01 = H.comp[1];
        const auto& h11 = H.comp[2];
        for (std::size_t i = 0; i < n; ++i) {
            double fx = gf.comp[0][i], fy = gf.comp[1][i];
            lap[i] = h00[i] + h11[i];
            g2[i] = fx * fx + fy * fy;
            hgg[i] = h00[i] * fx * fx + 2.0 * h01[i] * fx * fy + h11[i] * fy * fy;
            hh[i] = h00[i] * h00[i] + 2.0 * h01[i] * h01[i] + h11[i] * h11[i];
        }
    }

    const double c = 1.0 / (2.0 * m - 1.0);
    Terms t{};
    std::vector<double> acc(n);
    auto reduce = [&](auto&& fill) {
        for (std::size_t i = 0; i < n; ++i) acc[i] = fill(i);
        return g.cell_volume() * pairwise_sum(acc);
    };
    t.t_mix = reduce([&](std::size_t i) { return um1[i] * lap[i] * g2[i] / f.v[i]; });
    t.t_h = reduce([&](std::size_t i) { return um1[i] * hgg[i] / f.v[i]; });
    t.t_4 = reduce([&](std::size_t i) {
        return um1[i] * g2[i] * g2[i] / (f.v[i] * f.v[i]);
    });
    t.t_hh = reduce([&](std::size_t i) { return um1[i] * hh[i]; });
    t.t_dd = reduce([&](std::size_t i) { return um1[i] * lap[i] * lap[i]; });
    t.entropy = reduce([&](std::size_t i) { return umm[i]; });
    t.fisher = reduce([&](std::size_t i) { return g2[i]; });
    t.first_square = reduce([&](std::size_t i) {
        double q = lap[i] - c * g2[i] / f.v[i];
        return um1[i] * q * q;
    });
    double shift = 2.0 * m * c * t.fisher / t.entropy;
    t.completed_square = reduce([&](std::size_t i) {
        double q = lap[i] - c * g2[i] / f.v[i] + shift * std::sqrt(u.v[i]);
        return um1[i] * q * q;
    });
    t.remainder_int = reduce([&](std::size_t i) {
        if (d == 1) return 0.0;  // traceless parts of scalars vanish
        double fx = gf.comp[0][i], fy = gf.comp[1][i];
        double half_lap = 0.5 * lap[i];
        double half_g2f = 0.5 * g2[i] / f.v[i];
        double l00 = H.comp[0][i] - half_lap;
        double l01 = H.comp[1][i];
        double l11 = H.comp[2][i] - half_lap;
        double m00 = fx * fx / f.v[i] - half_g2f;
        double m01 = fx * fy / f.v[i];
        double m11 = fy * fy / f.v[i] - half_g2f;
        double d00 = l00 - c * m00, d01 = l01 - c * m01, d11 = l11 - c * m11;
        return um1[i] * (d00 * d00 + 2.0 * d01 * d01 + d11 * d11);
    });
    t.min_u = *std::min_element(u.v.begin(), u.v.end());
    t.boundary_frac = boundary_mass_fraction(u);
    return t;
}

}  // namespace

Field pressure_f(const Field& u, double m, double floor_rel) {
    if (!(m > 0.5 && m < 1.0))
        throw std::invalid_argument("pressure variable: m must lie in (1/2, 1)");
    return pow_floor(u, m - 0.5, floor_rel);
}

Field pressure_f_fractional(const Field& u, double m, double s,
                            double floor_rel) {
    if (!(s >= 0.0 && s < 1.0))
        throw std::invalid_argument("pressure variable: s must lie in [0, 1)");
    return frac_laplacian(pressure_f(u, m, floor_rel), -0.5 * s);
}

IdentityReport id1_residual(const Field& u, double m, double floor_rel,
                            double uv_scale) {
    require_positive(u, floor_rel, "first identity");
    Terms t = compute_terms(u, m, u.grid.dim());
    IdentityReport rep;
    rep.lhs = -t.t_mix;
    // the |grad f|^4 coefficient collects the gradient relation (scaled by
    // uv_scale) with the -1 from the product rule
    double quartic = uv_scale * 2.0 * (m - 1.0) / (2.0 * m - 1.0) - 1.0;
    rep.rhs = 2.0 * t.t_h + quartic * t.t_4;
    rep.resid = rel_gap(rep.lhs, rep.rhs);
    rep.min_u = t.min_u;
    rep.boundary_frac = t.boundary_frac;
    return rep;
}

IdentityReport id2_residual(const Field& u, double m, double floor_rel) {
    require_positive(u, floor_rel, "second identity");
    Terms t = compute_terms(u, m, u.grid.dim());
    IdentityReport rep;
    rep.lhs = -(2.0 * m - 1.0) * t.t_dd;
    rep.rhs = -(2.0 * m - 1.0) * t.t_hh - 6.0 * (m - 1.0) * t.t_h +
              2.0 * (m - 1.0) / (2.0 * m - 1.0) * t.t_4;
    rep.resid = rel_gap(rep.lhs, rep.rhs);
    rep.min_u = t.min_u;
    rep.boundary_frac = t.boundary_frac;
    return rep;
}

LmReport lm_matrices(const Field& f, double floor_rel) {
    require_positive(f, floor_rel, "traceless split");
    const Grid& g = f.grid;
    const int d = g.dim();
    const std::size_t n = f.size();
    VectorField gf = gradient(f);
    MatrixField H = hessian(f);
    LmReport rep(g);

    for (std::size_t i = 0; i < n; ++i) {
        if (d == 1) {
            rep.L.comp[0][i] = 0.0;
            rep.M.comp[0][i] = 0.0;
            continue;
        }
        double fx = gf.comp[0][i], fy = gf.comp[1][i];
        double lap = H.comp[0][i] + H.comp[2][i];
        double g2 = fx * fx + fy * fy;
        rep.L.comp[0][i] = H.comp[0][i] - 0.5 * lap;
        rep.L.comp[1][i] = H.comp[1][i];
        rep.L.comp[2][i] = H.comp[2][i] - 0.5 * lap;
        rep.M.comp[0][i] = fx * fx / f.v[i] - 0.5 * g2 / f.v[i];
        rep.M.comp[1][i] = fx * fy / f.v[i];
        rep.M.comp[2][i] = fy * fy / f.v[i] - 0.5 * g2 / f.v[i];
    }

    auto upd = [](double& worst, double lhs, double rhs) {
        worst = std::max(worst, rel_gap(lhs, rhs));
    };
    for (std::size_t i = 0; i < n; ++i) {
        double fx = gf.comp[0][i];
        double fy = d == 2 ? gf.comp[1][i] : 0.0;
        double g2 = fx * fx + fy * fy;
        double lap, hh, hm, lm, l2, m2;
        if (d == 1) {
            lap = H.comp[0][i];
            hh = lap * lap;
            l2 = 0.0;
            m2 = 0.0;
            hm = 0.0;
            lm = 0.0;
        } else {
            lap = H.comp[0][i] + H.comp[2][i];
            hh = H.comp[0][i] * H.comp[0][i] + 2.0 * H.comp[1][i] * H.comp[1][i] +
                 H.comp[2][i] * H.comp[2][i];
            l2 = rep.L.comp[0][i] * rep.L.comp[0][i] +
                 2.0 * rep.L.comp[1][i] * rep.L.comp[1][i] +
                 rep.L.comp[2][i] * rep.L.comp[2][i];
            m2 = rep.M.comp[0][i] * rep.M.comp[0][i] +
                 2.0 * rep.M.comp[1][i] * rep.M.comp[1][i] +
                 rep.M.comp[2][i] * rep.M.comp[2][i];
            hm = H.comp[0][i] * rep.M.comp[0][i] +
                 2.0 * H.comp[1][i] * rep.M.comp[1][i] +
                 H.comp[2][i] * rep.M.comp[2][i];
            lm = rep.L.comp[0][i] * rep.M.comp[0][i] +
                 2.0 * rep.L.comp[1][i] * rep.M.comp[1][i] +
                 rep.L.comp[2][i] * rep.M.comp[2][i];
        }
        upd(rep.check_l, l2, hh - lap * lap / d);
        upd(rep.check_m, m2,
            (1.0 - 1.0 / d) * g2 * g2 / (f.v[i] * f.v[i]));
        upd(rep.check_lm, hm, lm);
    }
    return rep;
}

DecompositionReport iprime_decomposition(const Field& u, const ModelParams& p,
                                         double floor_rel) {
    if (p.s != 0.0)
        throw std::domain_error(
            "decomposition of I' requires s = 0: the derivative chain has no "
            "counterpart for the nonlocal pressure variable");
    require_positive(u, floor_rel, "decomposition of I'");
    const double m = p.m;
    const int d = p.d;
    const double m1 = (d - 1.0) / d;
    Terms t = compute_terms(u, m, d);

    DecompositionReport rep;
    rep.entropy = t.entropy;
    rep.fisher = t.fisher;
    rep.iprime_direct = std::numeric_limits<double>::quiet_NaN();
    rep.iprime_collected = -(2.0 * m - 1.0) * t.t_hh -
                           2.0 * (3.0 * m - 4.0) * t.t_h -
                           (3.0 - 2.0 * m) / (2.0 * m - 1.0) * t.t_4;
    rep.first_square = t.first_square;
    rep.completed_square = t.completed_square;
    rep.remainder = (2.0 * m - 1.0) / m * t.remainder_int;
    rep.iprime_squares =
        -(2.0 * m - 1.0) * (1.0 - m1 / m) * t.first_square - rep.remainder;
    rep.sigma = (2.0 / d) / (1.0 - m) - 1.0;
    double coeff = 2.0 * m * (1.0 - m) / (2.0 * m - 1.0);
    rep.g_definition = (rep.sigma - 1.0) * coeff * t.fisher * t.fisher +
                       t.entropy * rep.iprime_collected;
    rep.g_squares =
        -(2.0 * m - 1.0) * (1.0 - m1 / m) * t.entropy * t.completed_square -
        t.entropy * rep.remainder;
    rep.min_u = t.min_u;
    rep.boundary_frac = t.boundary_frac;
    return rep;
}

DecompositionReport iprime_decomposition(const FlowTrace& trace,
                                         std::size_t snap_idx,
                                         const ModelParams& p,
                                         double floor_rel) {
    if (snap_idx == 0 || snap_idx + 1 >= trace.snapshots.size())
        throw std::invalid_argument(
            "decomposition of I': need snapshots on both sides of the index");
    const auto& prev = trace.snapshots[snap_idx - 1];
    const auto& mid = trace.snapshots[snap_idx];
    const auto& next = trace.snapshots[snap_idx + 1];
    double dl = mid.first - prev.first, dr = next.first - mid.first;
    if (!(dl > 0.0) || std::abs(dl - dr) > 1e-6 * dl)
        throw std::invalid_argument("decomposition of I': snapshots must be equally spaced");

    DecompositionReport rep = iprime_decomposition(mid.second, p, floor_rel);
    auto fisher_of = [&](const Field& u) {
        Field f = pressure_f(u, p.m, floor_rel);
        return hs_seminorm(f, 2.0);
    };
    rep.iprime_direct = (fisher_of(next.second) - fisher_of(prev.second)) / (dl + dr);
    return rep;
}

GReport g_functional(const Field& u, const ModelParams& p, double floor_rel) {
    DecompositionReport rep = iprime_decomposition(u, p, floor_rel);
    GReport g;
    g.from_definition = rep.g_definition;
    g.from_squares = rep.g_squares;
    g.entropy = rep.entropy;
    g.iprime = rep.iprime_collected;
    return g;
}

FppProbe renyi_concavity_probe(const FlowTrace& trace) {
    FppProbe probe;
    probe.max_fpp = -std::numeric_limits<double>::infinity();
    const auto& r = trace.records;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
        double dl = r[i].t - r[i - 1].t, dr = r[i + 1].t - r[i].t;
        if (!(dl > 0.0) || std::abs(dl - dr) > 1e-6 * dl) continue;
        double fpp = (r[i + 1].renyi - 2.0 * r[i].renyi + r[i - 1].renyi) / (dl * dl);
        probe.t.push_back(r[i].t);
        probe.fpp.push_back(fpp);
        probe.max_fpp = std::max(probe.max_fpp, fpp);
    }
    if (probe.fpp.empty()) probe.max_fpp = 0.0;
    return probe;
}

}  // namespace fraflow
