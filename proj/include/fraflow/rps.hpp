#pragma once

#include <vector>

#include "fraflow/flow.hpp"
#include "fraflow/grid.hpp"
#include "fraflow/profiles.hpp"

namespace fraflow {

//---------------------------------------------------------------------------
// Entropy-power machinery in the variable f = u^(m-1/2), local (s = 0) case.
// The derivative chain for the Fisher information I = int |grad f|^2 rests
// on two integration-by-parts identities that are exact on the torus; they
// are exposed here as residual checks together with the assembled
// decomposition of I' and the concavity functional G of the entropy power.
//---------------------------------------------------------------------------

Field pressure_f(const Field& u, double m, double floor_rel = 0.0);

// Experimental nonlocal variant (-Delta)^(-s/2) u^(m-1/2); no identity chain
// is claimed for it, it only feeds direct differencing experiments.
Field pressure_f_fractional(const Field& u, double m, double s,
                            double floor_rel = 0.0);

struct IdentityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double resid = 0.0;  // |lhs-rhs| / max(|lhs|, |rhs|), 0 when both vanish
    double min_u = 0.0;
    double boundary_frac = 0.0;
};

// First identity: -int u^(m-1) lap f |grad f|^2/f against
// 2 int u^(m-1) Hf:(grad f x grad f)/f - 1/(2m-1) int u^(m-1) |grad f|^4/f^2.
// `uv_scale` rescales the numerator of the gradient relation
// grad(u^(m-1)) = 2(m-1)/(2m-1) u^(m-1) grad f / f used in the derivation;
// any value other than 1 is a deliberate mutation for negative controls.
IdentityReport id1_residual(const Field& u, double m, double floor_rel = 1e-9,
                            double uv_scale = 1.0);

// Second identity: the three-term expression for -(2m-1) int u^(m-1)(lap f)^2.
IdentityReport id2_residual(const Field& u, double m, double floor_rel = 1e-9);

struct LmReport {
    MatrixField L;  // Hf - (1/d) lap f Id
    MatrixField M;  // (grad f x grad f)/f - (1/d) |grad f|^2/f Id
    // max pointwise relative errors of the trace identities
    double check_l = 0.0;   // |L|^2 = |Hf|^2 - (lap f)^2/d
    double check_m = 0.0;   // |M|^2 = (1-1/d) |grad f|^4/f^2
    double check_lm = 0.0;  // Hf:M = L:M

    explicit LmReport(const Grid& g) : L(g), M(g) {}
};

LmReport lm_matrices(const Field& f, double floor_rel = 1e-9);

struct DecompositionReport {
    double entropy = 0.0;             // E = int u^m
    double fisher = 0.0;              // I = int |grad f|^2
    double iprime_direct = 0.0;       // trace differencing (NaN if no trace)
    double iprime_collected = 0.0;    // three-integral form
    double iprime_squares = 0.0;      // -(2m-1)(1-m1/m) S - R
    double first_square = 0.0;        // S  = int u^(m-1)|lap f - q|^2
    double completed_square = 0.0;    // Sc = S with the (2m/(2m-1)) I/E shift
    double remainder = 0.0;           // R  = (2m-1)/m int u^(m-1)|Lf - Mf/(2m-1)|^2
    double sigma = 0.0;               // (2/d)/(1-m) - 1
    double g_definition = 0.0;        // (sigma-1) 2m(1-m)/(2m-1) I^2 + E I'
    double g_squares = 0.0;           // minus the two nonnegative integrals
    double min_u = 0.0;
    double boundary_frac = 0.0;
};

// All decomposition integrals at a single positive field; local case only
// (s must be 0: the chain has no nonlocal counterpart).
DecompositionReport iprime_decomposition(const Field& u, const ModelParams& p,
                                         double floor_rel = 1e-9);

// Adds direct differencing of I across three equally spaced snapshots of an
// original-frame run, evaluated at snapshot snap_idx.
DecompositionReport iprime_decomposition(const FlowTrace& trace,
                                         std::size_t snap_idx,
                                         const ModelParams& p,
                                         double floor_rel = 1e-9);

struct GReport {
    double from_definition = 0.0;
    double from_squares = 0.0;
    double entropy = 0.0;
    double iprime = 0.0;
};

GReport g_functional(const Field& u, const ModelParams& p,
                     double floor_rel = 1e-9);

// Sign probe for the concavity of the entropy power along any recorded run:
// centered second differences of the renyi column.
struct FppProbe {
    std::vector<double> t;
    std::vector<double> fpp;
    double max_fpp = 0.0;
};

FppProbe renyi_concavity_probe(const FlowTrace& trace);

}  // namespace fraflow
