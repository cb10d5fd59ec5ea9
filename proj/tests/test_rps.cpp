#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "fraflow/flow.hpp"
#include "fraflow/grid.hpp"
#include "fraflow/profiles.hpp"
#include "fraflow/rps.hpp"
#include "fraflow/spectral.hpp"

#include "helpers.hpp"

using namespace fraflow;
using namespace testutil;

namespace {

const double kPi = std::acos(-1.0);

Field trig_positive(const Grid& g) {
    const double w = kPi / g.half_width();
    return fill(g, [&](const std::vector<double>& x) {
        double phase = std::cos(w * x[0]);
        if (x.size() == 2) phase += 0.5 * std::cos(w * x[1]);
        return std::exp(phase);
    });
}

}  // namespace

TEST_CASE("derivative-swap identities hold on analytic fields") {
    for (int d : {1, 2}) {
        Grid g(d, d == 1 ? 256 : 128, 10.0);
        Field u = trig_positive(g);
        IdentityReport i1 = id1_residual(u, 0.75);
        IdentityReport i2 = id2_residual(u, 0.75);
        CHECK(i1.resid < 1e-8);
        CHECK(i2.resid < 1e-8);
        CHECK(i1.min_u > 0.0);
    }
}

TEST_CASE("mutated chain rule is caught") {
    Grid g(1, 256, 10.0);
    Field u = trig_positive(g);
    IdentityReport bad = id1_residual(u, 0.75, 1e-9, 0.5);
    CHECK(bad.resid > 1e-3);
}

TEST_CASE("identities reject sign-degenerate input") {
    Grid g(1, 64, 5.0);
    Field u = fill(g, [](const std::vector<double>& x) { return x[0]; });
    CHECK_THROWS(id1_residual(u, 0.75));
}

TEST_CASE("traceless decompositions are exact pointwise") {
    for (int d : {1, 2}) {
        Grid g(d, d == 1 ? 256 : 128, 10.0);
        Field u = trig_positive(g);
        Field f = pressure_f(u, 0.75, 1e-9);
        LmReport lm = lm_matrices(f);
        CHECK(lm.check_l < 1e-12);
        CHECK(lm.check_m < 1e-12);
        CHECK(lm.check_lm < 1e-12);
    }
}

TEST_CASE("dissipation-rate decomposition: two integral routes agree") {
    for (int d : {1, 2}) {
        Grid g(d, d == 1 ? 256 : 128, 10.0);
        ModelParams p{d, 0.0, 0.75, 1.0};
        Field u = trig_positive(g);
        DecompositionReport rep = iprime_decomposition(u, p);

        CHECK(rep.entropy > 0.0);
        CHECK(rep.fisher > 0.0);
        CHECK(rep.sigma ==
              doctest::Approx(2.0 / (d * (1.0 - p.m)) - 1.0).epsilon(1e-12));
        CHECK(rel(rep.iprime_collected, rep.iprime_squares) < 1e-6);
        CHECK(rep.first_square >= 0.0);
        CHECK(rep.remainder >= 0.0);
        CHECK(rel(rep.g_definition, rep.g_squares) < 1e-6);
        CHECK(std::isnan(rep.iprime_direct));
    }
}

TEST_CASE("decomposition is local-case only") {
    Grid g(1, 64, 10.0);
    ModelParams p{1, 0.75, 0.8, 1.0};
    Field u = trig_positive(g);
    CHECK_THROWS(iprime_decomposition(u, p));
}

TEST_CASE("squares collapse on the stationary profile") {
    ModelParams p{1, 0.0, 0.75, 1.0};
    Grid g(1, 512, 16.0);
    Field b = barenblatt_s0(g, p.m, p.M).v;
    DecompositionReport rep = iprime_decomposition(b, p);

    const double scale = rep.fisher * rep.fisher / rep.entropy;
    CHECK(std::abs(rep.completed_square) * rep.entropy < 1e-3 * scale * rep.entropy);
    CHECK(std::abs(rep.remainder) * rep.entropy < 1e-3 * scale * rep.entropy);
    CHECK(std::abs(rep.g_definition) < 1e-3 * scale * rep.entropy);
}

TEST_CASE("pressure-variable evolution law") {
    ModelParams p{1, 0.0, 0.75, 1.0};
    Grid g(1, 256, 16.0);
    Field u0 = fill(g, [](const std::vector<double>& x) {
        return std::exp(-0.5 * x[0] * x[0]);
    });
    const double amp = 1.0 / integrate(u0);
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] *= amp;

    const double t0 = 0.1, dt = 0.005;
    FlowState st{0.0, u0, p, Frame::original};
    FlowOptions opts;
    opts.floor_rel = 1e-8;
    opts.stride = 0.02;
    opts.snapshot_times = {t0 - dt, t0, t0 + dt};
    FlowTrace tr = run_flow(st, t0 + 2.0 * dt, opts);
    REQUIRE(tr.snapshots.size() == 3);

    const double fl = 1e-8;
    Field fm = pressure_f(tr.snapshots[0].second, p.m, fl);
    Field f0 = pressure_f(tr.snapshots[1].second, p.m, fl);
    Field fp = pressure_f(tr.snapshots[2].second, p.m, fl);

    Field fdot(g);
    for (std::size_t i = 0; i < g.size(); ++i)
        fdot[i] = (fp[i] - fm[i]) / (2.0 * dt);

    // u^(m-1) [ (m-1/2) lap f + |grad f|^2 / (2 f) ]
    Field um1 = pow_floor(tr.snapshots[1].second, p.m - 1.0, fl);
    Field lap = frac_laplacian(f0, 1.0);
    VectorField gf = gradient(f0);
    Field expect(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double g2 = gf.comp[0][i] * gf.comp[0][i];
        expect[i] = um1[i] * ((p.m - 0.5) * -lap[i] + 0.5 * g2 / f0[i]);
    }
    CHECK(rel_l2(fdot, expect) < 1e-3);
}

TEST_CASE("direct differencing matches the collected integrals") {
    ModelParams p{1, 0.0, 0.75, 1.0};
    Grid g(1, 256, 16.0);
    Field u0 = fill(g, [](const std::vector<double>& x) {
        return std::exp(-0.5 * x[0] * x[0]);
    });
    const double amp = 1.0 / integrate(u0);
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] *= amp;

    FlowState st{0.0, u0, p, Frame::original};
    FlowOptions opts;
    opts.floor_rel = 1e-8;
    opts.stride = 0.02;
    opts.snapshot_times = {0.10, 0.15, 0.20};
    FlowTrace tr = run_flow(st, 0.25, opts);
    REQUIRE(tr.snapshots.size() == 3);

    DecompositionReport rep = iprime_decomposition(tr, 1, p);
    CHECK(std::isfinite(rep.iprime_direct));
    CHECK(rel(rep.iprime_direct, rep.iprime_collected) < 2e-2);
}

TEST_CASE("entropy-power concavity probe on a spreading run") {
    ModelParams p{1, 0.0, 0.75, 1.0};
    Grid g(1, 256, 16.0);
    Field u0 = fill(g, [](const std::vector<double>& x) {
        return std::exp(-0.5 * x[0] * x[0]);
    });
    const double amp = 1.0 / integrate(u0);
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] *= amp;

    FlowState st{0.0, u0, p, Frame::original};
    FlowOptions opts;
    opts.floor_rel = 1e-8;
    opts.stride = 0.02;
    FlowTrace tr = run_flow(st, 0.5, opts);

    FppProbe probe = renyi_concavity_probe(tr);
    REQUIRE(!probe.fpp.empty());
    double amp_fpp = 0.0;
    for (double v : probe.fpp) amp_fpp = std::max(amp_fpp, std::abs(v));
    CHECK(probe.max_fpp <= 1e-2 * amp_fpp + 1e-12);
}

TEST_CASE("fractional pressure variable falls back to the local one") {
    Grid g(1, 128, 10.0);
    Field u = trig_positive(g);
    Field a = pressure_f(u, 0.8, 1e-9);
    Field b = pressure_f_fractional(u, 0.8, 0.0, 1e-9);
    CHECK(rel_l2(a, b) < 1e-12);
}
