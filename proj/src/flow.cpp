#include "fraflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fraflow/reduce.hpp"
#include "fraflow/spectral.hpp"

namespace fraflow {

namespace {

double max_value(const std::vector<double>& v) {
    double m = v[0];
    for (double a : v) m = std::max(m, a);
    return m;
}

double min_value(const std::vector<double>& v) {
    double m = v[0];
    for (double a : v) m = std::min(m, a);
    return m;
}

bool all_finite(const std::vector<double>& v) {
    for (double a : v)
        if (!std::isfinite(a)) return false;
    return true;
}

// Shared flux assembly: sqrt(u) * grad (-Delta)^(-s) u^(m-1/2), plus x*u in
// the rescaled frame (the product x*u is formed in physical space).
Field rhs_impl(const Field& u, const ModelParams& p, double floor_rel, bool confined) {
    require_finite(u.v, "flow rhs");
    Field w = pow_floor(u, p.m - 0.5, floor_rel);
    VectorField vel = riesz_gradient(w, p.s);
    Field squ = pow_floor(u, 0.5, floor_rel);
    VectorField flux(u.grid);
    if (confined) {
        VectorField x = coordinate_field(u.grid);
        for (int a = 0; a < u.grid.dim(); ++a)
            for (std::size_t i = 0; i < u.size(); ++i)
                flux.comp[a][i] = squ.v[i] * vel.comp[a][i] + x.comp[a][i] * u.v[i];
    } else {
        for (int a = 0; a < u.grid.dim(); ++a)
            for (std::size_t i = 0; i < u.size(); ++i)
                flux.comp[a][i] = squ.v[i] * vel.comp[a][i];
    }
    return divergence(flux);
}

}  // namespace

Field pow_floor(const Field& u, double e, double floor_rel) {
    double mx = max_value(u.v);
    if (!(mx > 0.0)) throw std::domain_error("pow_floor: field has no positive part");
    double floor = floor_rel * mx;
    Field out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i)
        out.v[i] = std::pow(std::max(u.v[i], floor), e);
    return out;
}

Field rhs_original(const Field& u, const ModelParams& p, double floor_rel) {
    return rhs_impl(u, p, floor_rel, false);
}

Field rhs_rescaled(const Field& u, const ModelParams& p, double floor_rel) {
    return rhs_impl(u, p, floor_rel, true);
}

double stable_dt(const Field& u, const ModelParams& p, Frame frame, double floor_rel) {
    // Frozen-coefficient estimate: the linearized symbol is bounded by
    // (m-1/2) max(u^(m-1)) |xi|^(2(1-s)), plus |x| |xi| advection from the
    // confining term. RK4 covers [-2.78, 0] on the real axis.
    const Grid& g = u.grid;
    double mx = max_value(u.v);
    double mn = std::max(min_value(u.v), floor_rel * mx);
    double dmax = std::pow(mn, p.m - 1.0);
    double xi_max = std::sqrt(static_cast<double>(g.dim())) * M_PI / g.spacing();
    double rate = (p.m - 0.5) * dmax * std::pow(xi_max, 2.0 * (1.0 - p.s));
    if (frame == Frame::rescaled)
        rate += (g.half_width() * std::sqrt(static_cast<double>(g.dim())) + g.dim()) * xi_max;
    return 2.78 / rate;
}

void rk4_step(FlowState& st, double dt, const FlowOptions& opts, FlowTrace& trace) {
    auto rhs = [&](const Field& u) -> Field {
        if (opts.rhs_override) return opts.rhs_override(u);
        return st.frame == Frame::original ? rhs_original(u, st.params, opts.floor_rel)
                                           : rhs_rescaled(u, st.params, opts.floor_rel);
    };
    const Field& u = st.u;
    Field k1 = rhs(u);
    Field tmp(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) tmp.v[i] = u.v[i] + 0.5 * dt * k1.v[i];
    Field k2 = rhs(tmp);
    for (std::size_t i = 0; i < u.size(); ++i) tmp.v[i] = u.v[i] + 0.5 * dt * k2.v[i];
    Field k3 = rhs(tmp);
    for (std::size_t i = 0; i < u.size(); ++i) tmp.v[i] = u.v[i] + dt * k3.v[i];
    Field k4 = rhs(tmp);
    for (std::size_t i = 0; i < u.size(); ++i)
        st.u.v[i] += dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
    st.t += dt;
    trace.steps += 1;

    double mx = max_value(st.u.v);
    if (mx > 0.0) {
        double floor = opts.floor_rel * mx;
        double added = 0.0;
        long long npts = 0;
        for (auto& v : st.u.v)
            if (v < 0.0) {
                added += floor - v;
                v = floor;
                ++npts;
            }
        if (npts > 0) {
            // The update itself is in divergence form, so the only mass the
            // step can create is what the floor just lifted; renormalize it
            // away so clipping is mass-neutral and drift stays at roundoff.
            double lifted = added * st.u.grid.cell_volume();
            double m_now = integrate(st.u);
            double m_tgt = m_now - lifted;
            if (m_tgt > 0.0 && m_now > 0.0) {
                double scale = m_tgt / m_now;
                for (auto& v : st.u.v) v *= scale;
            }
            trace.clipped_mass += lifted;
            trace.clipped_points += npts;
        }
    }
}

DiagRecord diagnostics(const Field& u, const ModelParams& p, double floor_rel) {
    DerivedExponents e = exponents(p);
    DiagRecord r{};
    r.mass = integrate(u);
    Field um(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i)
        um.v[i] = std::pow(std::max(u.v[i], 0.0), p.m);
    r.entropy = integrate(um);
    // The pressure power m - 1/2 is below one, so its gradient blows up
    // wherever the far tail rings through zero; use the same positivity
    // floor as the flux so the production integral measures the solution,
    // not the grid noise at the clip boundary.
    Field w = pow_floor(u, p.m - 0.5, floor_rel);
    r.fisher = hs_seminorm(w, e.alpha);
    r.renyi = std::pow(r.entropy, e.sigma);
    r.boundary_frac = boundary_mass_fraction(u);
    r.min_u = min_value(u.v);
    return r;
}

FlowTrace run_flow(FlowState& state, double T, const FlowOptions& opts) {
    FlowTrace trace;
    double t_end = state.t + T;
    auto snaps = opts.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    while (next_snap < snaps.size() && snaps[next_snap] <= state.t + 1e-14) {
        trace.snapshots.emplace_back(state.t, state.u);
        ++next_snap;
    }

    DiagRecord r0 = diagnostics(state.u, state.params, opts.floor_rel);
    r0.t = state.t;
    r0.dt = 0.0;
    trace.records.push_back(r0);

    double next_record = state.t + opts.stride;
    while (state.t < t_end - 1e-13) {
        double dt = opts.fixed_dt > 0.0
                        ? opts.fixed_dt
                        : opts.cfl * stable_dt(state.u, state.params, state.frame,
                                               opts.floor_rel);
        dt = std::min(dt, opts.stride);
        double barrier = std::min(next_record, t_end);
        if (next_snap < snaps.size()) barrier = std::min(barrier, snaps[next_snap]);
        dt = std::min(dt, barrier - state.t);
        if (!(dt > 0.0)) dt = 1e-15;

        rk4_step(state, dt, opts, trace);

        if (!all_finite(state.u.v)) {
            trace.degraded = true;
            trace.note = "non-finite state at t = " + std::to_string(state.t);
            break;
        }
        if (trace.steps >= opts.max_steps) {
            trace.degraded = true;
            trace.note = "step budget exhausted";
            break;
        }

        if (next_snap < snaps.size() && state.t >= snaps[next_snap] - 1e-12) {
            trace.snapshots.emplace_back(state.t, state.u);
            ++next_snap;
        }
        if (state.t >= next_record - 1e-12 || state.t >= t_end - 1e-13) {
            DiagRecord r = diagnostics(state.u, state.params, opts.floor_rel);
            r.t = state.t;
            r.dt = dt;
            trace.records.push_back(r);
            while (next_record <= state.t + 1e-12) next_record += opts.stride;
        }
    }
    return trace;
}

std::vector<EiResidual> check_ei(const FlowTrace& trace, const ModelParams& p,
                                 int stride_factor) {
    if (stride_factor < 1) throw std::invalid_argument("check_ei: bad stride factor");
    std::vector<const DiagRecord*> rec;
    for (std::size_t i = 0; i < trace.records.size(); i += stride_factor)
        rec.push_back(&trace.records[i]);
    std::vector<EiResidual> out;
    double coeff = 2.0 * p.m * (1.0 - p.m) / (2.0 * p.m - 1.0);
    for (std::size_t i = 1; i + 1 < rec.size(); ++i) {
        EiResidual r{};
        r.t = rec[i]->t;
        r.dE = (rec[i + 1]->entropy - rec[i - 1]->entropy) / (rec[i + 1]->t - rec[i - 1]->t);
        r.expected = coeff * rec[i]->fisher;
        double denom = std::abs(r.expected);
        r.rel = denom > 0.0 ? std::abs(r.dE - r.expected) / denom : 0.0;
        r.abs_over_E = std::abs(r.dE - r.expected) / rec[i]->entropy;
        out.push_back(r);
    }
    return out;
}

RenyiVerdict renyi_slope(const FlowTrace& trace, double kappa_ref, double tol) {
    RenyiVerdict v{};
    v.kappa_ref = kappa_ref;
    v.min_slope = std::numeric_limits<double>::infinity();
    const auto& rec = trace.records;
    for (std::size_t i = 1; i + 1 < rec.size(); ++i) {
        double sl = (rec[i + 1].renyi - rec[i - 1].renyi) / (rec[i + 1].t - rec[i - 1].t);
        v.t.push_back(rec[i].t);
        v.slope.push_back(sl);
        v.min_slope = std::min(v.min_slope, sl);
    }
    v.pass = !v.slope.empty() && v.min_slope >= kappa_ref * (1.0 - tol);
    return v;
}

double relative_entropy(const Field& u, const Field& ref, double m) {
    if (!(u.grid == ref.grid)) throw std::invalid_argument("relative_entropy: grid mismatch");
    double mu = integrate(u), mr = integrate(ref);
    if (std::abs(mu - mr) > 1e-6 * std::abs(mr))
        throw std::invalid_argument("relative_entropy: mass mismatch " +
                                    std::to_string(mu) + " vs " + std::to_string(mr));
    std::vector<double> integrand(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        double a = std::max(u.v[i], 0.0), b = std::max(ref.v[i], 0.0);
        double bm1 = std::pow(b, m - 1.0);
        integrand[i] = std::pow(a, m) - b * bm1 - m * bm1 * (a - b);
    }
    return u.grid.cell_volume() * pairwise_sum(integrand) / (m - 1.0);
}

}  // namespace fraflow
