#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fraflow/grid.hpp"
#include "fraflow/profiles.hpp"

namespace fraflow {

enum class Frame { original, rescaled };

struct FlowOptions {
    double stride = 0.02;      // spacing of diagnostic records
    double cfl = 0.2;          // fraction of the linear stability limit
    double floor_rel = 1e-12;  // positivity floor, relative to max u
    double fixed_dt = 0.0;     // > 0 disables the adaptive controller
    long long max_steps = 50'000'000;
    std::vector<double> snapshot_times;  // states stored for later analysis
    // Test hook: replaces the physical right-hand side when set.
    std::function<Field(const Field&)> rhs_override;
};

struct DiagRecord {
    double t;
    double mass;           // integral of u
    double entropy;        // E = integral of u^m
    double fisher;         // I = |grad (-Delta)^(-s/2) u^(m-1/2)|_2^2
    double renyi;          // F = E^sigma
    double boundary_frac;  // mass fraction in the outer half of the box
    double min_u;
    double dt;             // time step in use when the record was taken
};

struct FlowTrace {
    std::vector<DiagRecord> records;
    std::vector<std::pair<double, Field>> snapshots;
    double clipped_mass = 0.0;   // mass added by clipping negative values
    long long clipped_points = 0;
    long long steps = 0;
    bool degraded = false;
    std::string note;
};

struct FlowState {
    double t = 0.0;
    Field u;
    ModelParams params;
    Frame frame = Frame::original;
};

// max(u, floor)^e with floor = floor_rel * max(u).
Field pow_floor(const Field& u, double e, double floor_rel);

// div( sqrt(u) grad (-Delta)^(-s) u^(m-1/2) ); exactly zero-mean.
Field rhs_original(const Field& u, const ModelParams& p, double floor_rel = 1e-12);

// Same with the confining flux x*u added before the divergence.
Field rhs_rescaled(const Field& u, const ModelParams& p, double floor_rel = 1e-12);

// Largest stable time step estimate for the current state (before the cfl
// safety factor is applied).
double stable_dt(const Field& u, const ModelParams& p, Frame frame, double floor_rel);

// One explicit RK4 step; clips negative values to the floor afterwards and
// accounts the added mass into the trace.
void rk4_step(FlowState& st, double dt, const FlowOptions& opts, FlowTrace& trace);

// Mass / entropy / production integrals of a state. The production field
// u^(m-1/2) gets the same positivity floor as the flux, since powers below
// one have unbounded gradients where the tail touches zero.
DiagRecord diagnostics(const Field& u, const ModelParams& p, double floor_rel = 1e-8);

// Advances until state.t + T, recording diagnostics every `stride` and
// storing snapshots at the requested times. On a non-finite state the trace
// is returned truncated with `degraded` set.
FlowTrace run_flow(FlowState& state, double T, const FlowOptions& opts);

//---------------------------------------------------------------------------
// Trace analysis.
//---------------------------------------------------------------------------

struct EiResidual {
    double t;
    double dE;        // centered difference of the entropy
    double expected;  // 2m(1-m)/(2m-1) * I
    double rel;       // |dE - expected| / |expected|
    double abs_over_E;
};

// Entropy production check at interior records, optionally subsampling the
// trace (stride_factor = 2 doubles the differencing stride).
std::vector<EiResidual> check_ei(const FlowTrace& trace, const ModelParams& p,
                                 int stride_factor = 1);

struct RenyiVerdict {
    std::vector<double> t;
    std::vector<double> slope;  // centered differences of F
    double min_slope;
    double kappa_ref;
    bool pass;  // min slope >= kappa_ref * (1 - tol)
};

RenyiVerdict renyi_slope(const FlowTrace& trace, double kappa_ref, double tol = 1e-2);

// Bregman relative entropy (1/(m-1)) int u^m - r^m - m r^(m-1) (u - r);
// requires matching mass to 1e-6 relative. Nonnegative for m in (0, 1).
double relative_entropy(const Field& u, const Field& ref, double m);

//---------------------------------------------------------------------------
// Stationary profile of the rescaled flow.
//---------------------------------------------------------------------------

struct StationaryOptions {
    int max_fixed_point = 400;      // inverse-operator fixed-point iterations
    double damping = 0.8;
    double target_residual = 1e-4;  // in stationarity_residual units; the
                                    // functional itself has a discretization
                                    // floor of a few 1e-5 at n ~ 256
    double polish_time = 2.0;       // rescaled-flow time budget for polishing
    double cfl = 0.2;
    double floor_rel = 1e-12;       // tight: a coarse positivity floor costs
                                    // more residual than it saves in step size
};

struct StationaryResult {
    Field v;
    double residual;
    int fixed_point_iters;
    double polish_time_used;
    bool converged;
};

// Numerical stationary profile: a damped fixed-point iteration on the
// integrated stationarity relation (exact for s = 0), then the rescaled flow
// itself as the finishing and certifying stage.
StationaryResult compute_stationary_profile(const Grid& g, const ModelParams& p,
                                            const StationaryOptions& opts = {});

}  // namespace fraflow
