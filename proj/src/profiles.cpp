#include "fraflow/profiles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fraflow/reduce.hpp"
#include "fraflow/resample.hpp"
#include "fraflow/spectral.hpp"

namespace fraflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Evaluates (c0 + c2 |x|^2)^e on the grid.
Field radial_power(const Grid& g, double c0, double c2, double e) {
    Field out(g);
    int n = g.n();
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) {
            double x = g.coord(i);
            out.v[i] = std::pow(c0 + c2 * x * x, e);
        }
    } else {
        for (int ix = 0; ix < n; ++ix) {
            double x = g.coord(ix);
            for (int iy = 0; iy < n; ++iy) {
                double y = g.coord(iy);
                out.v[static_cast<std::size_t>(ix) * n + iy] =
                    std::pow(c0 + c2 * (x * x + y * y), e);
            }
        }
    }
    return out;
}

}  // namespace

void ModelParams::validate() const {
    if (d != 1 && d != 2)
        throw std::invalid_argument("ModelParams: d must be 1 or 2");
    if (!(s >= 0.0 && s < 1.0))
        throw std::invalid_argument("ModelParams: s must lie in [0, 1)");
    double alpha = 2.0 * (1.0 - s);
    if (s > 0.0 && !(alpha < d))
        throw std::invalid_argument(
            "ModelParams: alpha = 2(1-s) = " + std::to_string(alpha) +
            " must be < d = " + std::to_string(d) + " when s > 0");
    if (!(m > 0.5 && m < 1.0))
        throw std::invalid_argument("ModelParams: m must lie in (1/2, 1)");
    double m1 = 1.0 - alpha / (2.0 * d);
    if (m < m1 - 1e-12)
        throw std::invalid_argument(
            "ModelParams: m = " + std::to_string(m) +
            " must be >= m1 = 1 - alpha/(2d) = " + std::to_string(m1));
    if (!(M > 0.0))
        throw std::invalid_argument("ModelParams: mass M must be positive");
}

DerivedExponents exponents(const ModelParams& par) {
    par.validate();
    DerivedExponents e;
    e.d = par.d;
    e.s = par.s;
    e.m = par.m;
    e.alpha = 2.0 * (1.0 - par.s);
    e.m1 = 1.0 - e.alpha / (2.0 * par.d);
    e.mc = 1.0 - e.alpha / par.d;
    e.p = 1.0 / (2.0 * par.m - 1.0);
    e.q = e.alpha < par.d ? 2.0 * par.d / (par.d - e.alpha) : kNaN;
    double den = par.d + e.alpha - e.p * (par.d - e.alpha);
    e.theta = (par.d / e.p) * (e.p - 1.0) / den;
    e.sigma = (par.m - e.mc) / (1.0 - par.m);
    e.mu = par.d * (par.m - e.mc);
    if (e.alpha < par.d) {
        double gden = par.d - e.p * (par.d - 2.0 * e.alpha);
        e.gamma = gden != 0.0 ? den / gden : kNaN;
    } else {
        e.gamma = kNaN;
    }
    e.critical = std::abs(par.m - e.m1) < 1e-12;
    return e;
}

double special_m(int d, double s) {
    return (d + 1.0) / (d + 2.0 * (1.0 - s));
}

double at_constant(int d, double alpha) {
    if (!(alpha > 0.0 && alpha < d))
        throw std::invalid_argument("at_constant: alpha must lie in (0, d)");
    return std::pow(2.0, alpha) * std::tgamma((d + alpha) / 2.0) /
           std::tgamma((d - alpha) / 2.0);
}

double sobolev_constant(int d, double alpha) {
    if (!(alpha > 0.0 && alpha < d))
        throw std::invalid_argument("sobolev_constant: alpha must lie in (0, d)");
    double ratio = std::tgamma((d + alpha) / 2.0) / std::tgamma((d - alpha) / 2.0);
    double vol = std::pow(std::tgamma(d / 2.0) / std::tgamma(static_cast<double>(d)),
                          alpha / d);
    return std::pow(2.0, alpha) * std::pow(M_PI, alpha / 2.0) * ratio * vol;
}

Field aubin_talenti_profile(const Grid& g, double alpha) {
    if (!(alpha > 0.0 && alpha < g.dim()))
        throw std::invalid_argument("aubin_talenti_profile: alpha must lie in (0, d)");
    return radial_power(g, 1.0, 1.0, -(g.dim() - alpha) / 2.0);
}

Field vstar_profile(const Grid& g) {
    return radial_power(g, 1.0, 1.0, -static_cast<double>(g.dim()));
}

BarenblattS0 barenblatt_s0(const Grid& g, double m, double M, double boundary_tol) {
    if (!(m > 0.5 && m < 1.0))
        throw std::invalid_argument("barenblatt_s0: m must lie in (1/2, 1)");
    if (!(M > 0.0)) throw std::invalid_argument("barenblatt_s0: M must be positive");
    // Grid integrability of the tail needs m above the classical critical
    // exponent 1 - 2/d; automatic here since m > 1/2 >= 1 - 2/d for d <= 2.
    double b = (1.0 - m) / (2.0 * m - 1.0);
    double e = -1.0 / (1.0 - m);
    auto mass_of = [&](double C) { return integrate(radial_power(g, C, b, e)); };

    double lo = 1.0, hi = 1.0;
    while (mass_of(lo) < M) {
        lo *= 0.25;
        if (lo < 1e-280)
            throw std::domain_error("barenblatt_s0: cannot bracket normalization (M too large)");
    }
    while (mass_of(hi) > M) {
        hi *= 4.0;
        if (hi > 1e280)
            throw std::domain_error("barenblatt_s0: cannot bracket normalization (M too small)");
    }
    double C = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        C = std::sqrt(lo * hi);  // geometric midpoint, C spans many scales
        double mass = mass_of(C);
        if (std::abs(mass - M) <= 1e-10 * M) break;
        (mass > M ? lo : hi) = C;
    }
    BarenblattS0 out{radial_power(g, C, b, e), C};
    double bf = boundary_mass_fraction(out.v);
    if (bf > boundary_tol)
        throw std::domain_error(
            "barenblatt_s0: boundary_mass_fraction = " + std::to_string(bf) +
            " exceeds tolerance " + std::to_string(boundary_tol) +
            " (profile too wide for the box)");
    return out;
}

SpecialStationary special_stationary_profile(const Grid& g, const ModelParams& par) {
    par.validate();
    double ms = special_m(g.dim(), par.s);
    if (std::abs(par.m - ms) > 1e-9)
        throw std::invalid_argument(
            "special_stationary_profile: m must equal (d+1)/(d+2(1-s)) = " +
            std::to_string(ms));
    DerivedExponents e = exponents(par);
    double p = e.p;

    // Base shape and the stationarity balance grad K w0 = -c x w0^p; c is
    // recovered by least squares on the grid. The exponent -(d+2s)/2 is the
    // one whose inverse-operator image stays inside the same family; the
    // balance of the two resulting powers forces p = (d+2-2s)/(d+2s), which
    // is exactly the coincidence exponent above.
    Field w0 = radial_power(g, 1.0, 1.0, -0.5 * (g.dim() + 2.0 * par.s));
    VectorField T = riesz_gradient(w0, par.s);
    VectorField x = coordinate_field(g);
    Field w0p(g);
    for (std::size_t i = 0; i < w0.size(); ++i) w0p.v[i] = std::pow(w0.v[i], p);

    double num = 0.0, den = 0.0, res2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        std::vector<double> targ(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            targ[i] = -x.comp[a][i] * w0p.v[i];
        num += pairwise_dot(T.comp[a], targ);
        den += pairwise_dot(targ, targ);
    }
    double c = num / den;
    for (int a = 0; a < g.dim(); ++a) {
        std::vector<double> diff(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            diff[i] = T.comp[a][i] + c * x.comp[a][i] * w0p.v[i];
        res2 += pairwise_dot(diff, diff);
    }
    SpecialStationary out{Field(g), 0.0, 0.0, std::sqrt(res2 / (c * c * den))};

    // Amplitude from the fitted balance, then the mass-selecting dilation,
    // both exact operations on the closed-form family.
    double A = std::pow(c, 1.0 / (1.0 - par.m));
    Field v0(g);
    for (std::size_t i = 0; i < g.size(); ++i) v0.v[i] = std::pow(w0.v[i], 2.0 * p);
    double M1 = A * integrate(v0);
    double a_dil = (2.0 - 2.0 * par.s) / (1.0 - par.m);
    double eM = a_dil - g.dim();
    double lam = std::pow(par.M / M1, 1.0 / eM);
    out.amplitude = A;
    out.lambda = lam;
    out.v = radial_power(g, 1.0, lam * lam, -p * (g.dim() + 2.0 * par.s));
    double amp = std::pow(lam, a_dil) * A;
    for (auto& vi : out.v.v) vi *= amp;
    return out;
}

double scale_R(double t, double mu) {
    if (!(1.0 + mu * t > 0.0))
        throw std::domain_error("scale_R: requires 1 + mu t > 0");
    return std::pow(1.0 + mu * t, 1.0 / mu);
}

Field rescale(const Field& u, double t, double mu, RescaleDirection dir,
              double boundary_tol) {
    double R = scale_R(t, mu);
    double factor = dir == RescaleDirection::to_rescaled ? R : 1.0 / R;
    if (factor > 1.0) {
        // Evaluation points leave the box and wrap; refuse unless the input
        // has decayed there.
        double bf = boundary_mass_fraction(u);
        if (bf > boundary_tol)
            throw std::domain_error(
                "rescale: boundary_mass_fraction = " + std::to_string(bf) +
                " exceeds tolerance " + std::to_string(boundary_tol));
    }
    Field out = resample_scaled(u, factor);
    double dd = static_cast<double>(u.grid.dim());
    double amp = std::pow(R, dir == RescaleDirection::to_rescaled ? dd : -dd);
    for (auto& v : out.v) v *= amp;
    return out;
}

double kappa(const DerivedExponents& e, double M, double c_gns) {
    if (!(c_gns > 0.0)) throw std::invalid_argument("kappa: C must be positive");
    double expo = 1.0 / (e.p * e.theta);
    return (2.0 * e.m / (2.0 * e.m - 1.0)) * (e.m - e.mc) *
           std::pow(M / std::pow(c_gns, 2.0 * e.p), expo);
}

double kappa_star(const DerivedExponents& e, double renyi_of_profile) {
    return e.mu * renyi_of_profile;
}

}  // namespace fraflow
