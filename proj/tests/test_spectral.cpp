#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "fraflow/grid.hpp"
#include "fraflow/profiles.hpp"
#include "fraflow/resample.hpp"
#include "fraflow/spectral.hpp"

#include "helpers.hpp"

using namespace fraflow;
using namespace testutil;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_CASE("grid geometry") {
    Grid g(1, 8, 2.0);
    CHECK(g.spacing() == doctest::Approx(0.5));
    CHECK(g.coord(0) == doctest::Approx(-2.0));
    CHECK(g.coord(7) == doctest::Approx(1.5));
    CHECK(g.freq(1) == doctest::Approx(kPi / 2.0));
    CHECK(g.freq(7) == doctest::Approx(-kPi / 2.0));
    CHECK(g.size() == 8);

    Grid g2(2, 8, 2.0);
    CHECK(g2.size() == 64);
    CHECK(g2.cell_volume() == doctest::Approx(0.25));
}

TEST_CASE("quadrature matches a closed-form antiderivative") {
    // integral of 1/(1+x^2) over [-20,20] is 2*atan(20)
    Grid g(1, 1024, 20.0);
    Field u = fill(g, [](const std::vector<double>& x) {
        return 1.0 / (1.0 + x[0] * x[0]);
    });
    CHECK(integrate(u) == doctest::Approx(2.0 * std::atan(20.0)).epsilon(1e-6));
}

TEST_CASE("fft round trip and Parseval") {
    for (int d : {1, 2}) {
        Grid g(d, 64, 5.0);
        Field u = random_smooth(g, 42 + d);
        Spectrum spec = forward_fft(u);
        Field back = inverse_fft(g, spec);
        CHECK(rel_l2(back, u) < 1e-13);

        double phys = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) phys += u[i] * u[i];
        phys *= g.cell_volume();
        double four = 0.0;
        for (const auto& c : spec) four += std::norm(c);
        four *= g.cell_volume() / static_cast<double>(g.size());
        CHECK(rel(phys, four) < 1e-13);
    }
}

TEST_CASE("fractional laplacian eigenfunctions") {
    Grid g(1, 128, 10.0);
    const double k = 3.0 * kPi / g.half_width();
    Field u = fill(g, [&](const std::vector<double>& x) {
        return std::cos(k * x[0]);
    });
    for (double beta : {0.3, 0.5, 1.0}) {
        Field v = frac_laplacian(u, beta);
        const double lam = std::pow(k * k, beta);
        double worst = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            worst = std::max(worst, std::abs(v[i] - lam * u[i]));
        CHECK(worst < 1e-10 * lam);
    }
    // beta = 0 is the identity, bit for bit
    Field same = frac_laplacian(u, 0.0);
    for (std::size_t i = 0; i < u.size(); ++i)
        REQUIRE(same[i] == u[i]);
}

TEST_CASE("fractional laplacian semigroup") {
    Grid g(2, 64, 6.0);
    Field u = random_smooth(g, 7);
    Field a = frac_laplacian(frac_laplacian(u, 0.3), 0.4);
    Field b = frac_laplacian(u, 0.7);
    CHECK(rel_l2(a, b) < 1e-12);
}

TEST_CASE("gradient and divergence are adjoint") {
    for (int d : {1, 2}) {
        Grid g(d, 64, 4.0);
        Field u = random_smooth(g, 11 + d);
        VectorField V(g);
        for (int a = 0; a < d; ++a) V.comp[a] = random_smooth(g, 100 + a + d).v;
        VectorField gu = gradient(u);
        double lhs = 0.0;
        for (int a = 0; a < d; ++a)
            for (std::size_t i = 0; i < g.size(); ++i)
                lhs += gu.comp[a][i] * V.comp[a][i];
        lhs *= g.cell_volume();
        Field dv = divergence(V);
        const double rhs = -inner(u, dv);
        CHECK(std::abs(lhs - rhs) < 1e-10 * (std::abs(lhs) + 1.0));
    }
}

TEST_CASE("divergence output has exactly zero mean") {
    Grid g(2, 32, 3.0);
    VectorField V(g);
    for (int a = 0; a < 2; ++a) V.comp[a] = random_positive(g, 5 + a).v;
    Field dv = divergence(V);
    CHECK(std::abs(integrate(dv)) < 1e-14 * linf(dv) * g.size());
}

TEST_CASE("riesz gradient reduces to the plain gradient at s=0") {
    Grid g(1, 64, 5.0);
    Field u = random_smooth(g, 3);
    VectorField a = riesz_gradient(u, 0.0);
    VectorField b = gradient(u);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(a.comp[0][i] - b.comp[0][i]));
    CHECK(worst < 1e-12 * linf(u));
}

TEST_CASE("hessian trace equals the negative fractional laplacian") {
    Grid g(2, 64, 4.0);
    Field u = random_smooth(g, 9);
    MatrixField H = hessian(u);
    Field lap = frac_laplacian(u, 1.0);  // (-Delta) u
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double tr = H.comp[H.entry(0, 0)][i] + H.comp[H.entry(1, 1)][i];
        worst = std::max(worst, std::abs(tr + lap[i]));
    }
    CHECK(worst < 1e-9 * linf(lap));
}

TEST_CASE("sobolev seminorm consistency") {
    Grid g(1, 128, 6.0);
    Field u = random_smooth(g, 21);
    CHECK(rel(hs_seminorm(u, 1.0), inner(u, frac_laplacian(u, 0.5))) < 1e-12);
    VectorField gu = gradient(u);
    double grad2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        grad2 += gu.comp[0][i] * gu.comp[0][i];
    grad2 *= g.cell_volume();
    CHECK(rel(hs_seminorm(u, 2.0), grad2) < 1e-12);
}

TEST_CASE("lp norms of a constant field") {
    Grid g(1, 64, 2.0);
    Field u = fill(g, [](const std::vector<double>&) { return -2.0; });
    CHECK(lp_norm(u, 2.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(lp_norm(u, 3.0) ==
          doctest::Approx(2.0 * std::pow(4.0, 1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("boundary mass fraction of a constant field") {
    for (int d : {1, 2}) {
        Grid g(d, 64, 3.0);
        Field u = fill(g, [](const std::vector<double>&) { return 1.0; });
        CHECK(boundary_mass_fraction(u) ==
              doctest::Approx(1.0 - std::pow(0.5, d)).epsilon(0.05));
    }
}

TEST_CASE("resolvent inverts the shifted operator") {
    Grid g(1, 64, 5.0);
    const double w = kPi / g.half_width();
    Field u = fill(g, [&](const std::vector<double>& x) {
        return 1.0 + std::cos(w * x[0]) + 0.3 * std::sin(3.0 * w * x[0]);
    });
    const double a = 0.7, beta = 0.6, c = 1.3;
    Field op = frac_laplacian(u, beta);
    for (std::size_t i = 0; i < u.size(); ++i) op[i] = a * op[i] + c * u[i];
    Field back = resolvent_frac_laplacian(op, beta, a, c);
    CHECK(rel_l2(back, u) < 1e-12);
}

TEST_CASE("trigonometric rescaling evaluates the interpolant") {
    Grid g(1, 128, 8.0);
    const double w = kPi / g.half_width();
    Field u = fill(g, [&](const std::vector<double>& x) {
        return std::cos(2.0 * w * x[0]);
    });
    Field v = resample_scaled(u, 2.0);  // samples of cos(4 w x)
    Field expect = fill(g, [&](const std::vector<double>& x) {
        return std::cos(4.0 * w * x[0]);
    });
    CHECK(rel_l2(v, expect) < 1e-11);
}

TEST_CASE("sharp constants from the gamma formula") {
    CHECK(at_constant(3, 2.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(at_constant(2, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sobolev_constant(3, 2.0) ==
          doctest::Approx(3.0 * std::pow(kPi / 2.0, 4.0 / 3.0)).epsilon(1e-12));
    CHECK(sobolev_constant(2, 1.0) ==
          doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("endpoint profile mass and rayleigh quotient") {
    // (1+r^2)^(-1/2) in d=2 at alpha=1: the 4th power integrates to pi, and
    // the quotient against the squared 4-norm approaches sqrt(pi).  The
    // quotient error is set by the slowly decaying tail, so it falls roughly
    // in half each time the box doubles; check that law rather than a tight
    // absolute tolerance at a small box.
    Grid g(2, 256, 20.0);
    Field w = aubin_talenti_profile(g, 1.0);
    Field w4(g);
    for (std::size_t i = 0; i < g.size(); ++i) w4[i] = std::pow(w[i], 4);
    CHECK(integrate(w4) == doctest::Approx(kPi).epsilon(1e-2));

    auto ray_err = [](int n, double L) {
        Grid gg(2, n, L);
        Field ww = aubin_talenti_profile(gg, 1.0);
        const double ray = hs_seminorm(ww, 1.0) / std::pow(lp_norm(ww, 4.0), 2.0);
        return std::abs(ray - std::sqrt(kPi)) / std::sqrt(kPi);
    };
    const double coarse = ray_err(128, 20.0);
    const double fine = ray_err(256, 40.0);
    CHECK(coarse < 0.2);
    CHECK(fine < 0.62 * coarse);  // tail error halves per box doubling
}
