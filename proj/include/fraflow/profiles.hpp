#pragma once

#include "fraflow/grid.hpp"

namespace fraflow {

// Parameters of the diffusion model: dimension, fractional order s (the
// velocity field is grad (-Delta)^(-s) applied to u^(m-1/2)), exponent m,
// total mass M. s = 0 is the classical local case; for s > 0 the interaction
// order alpha = 2(1-s) must lie below d.
struct ModelParams {
    int d = 1;
    double s = 0.0;
    double m = 0.75;
    double M = 1.0;

    // Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

// Exponents derived from (d, s, m). q and gamma are meaningful only for
// alpha < d and are set to NaN otherwise.
struct DerivedExponents {
    int d;
    double s;
    double m;
    double alpha;   // 2(1-s)
    double m1;      // 1 - alpha/(2d)
    double mc;      // 1 - alpha/d
    double p;       // 1/(2m-1)
    double q;       // 2d/(d-alpha), NaN if alpha >= d
    double theta;   // interpolation exponent
    double sigma;   // (m-mc)/(1-m)
    double mu;      // d(m-mc)
    double gamma;   // (d+alpha-p(d-alpha)) / (d-p(d-2 alpha)), NaN if alpha >= d
    bool critical;  // theta == 1, i.e. m == m1
};

DerivedExponents exponents(const ModelParams& p);

// m at which the optimal-profile and self-similar-profile families coincide.
double special_m(int d, double s);

// Sharp constant in  ||w||_{Hdot^(alpha/2)}^2 >= S ||w||_q^2  and the
// coefficient C in  (-Delta)^(alpha/2) w* = C w*^((d+alpha)/(d-alpha)), both
// via Gamma-function formulas; alpha in (0, d).
double sobolev_constant(int d, double alpha);
double at_constant(int d, double alpha);

//---------------------------------------------------------------------------
// Profiles evaluated on the grid.
//---------------------------------------------------------------------------

// w*(x) = (1 + |x|^2)^(-(d-alpha)/2)
Field aubin_talenti_profile(const Grid& g, double alpha);

// v*(x) = (1 + |x|^2)^(-d)  (equals w*^q)
Field vstar_profile(const Grid& g);

struct BarenblattS0 {
    Field v;
    double C;  // normalization found by bisection
};

// Classical (s = 0) stationary profile of the rescaled flow,
//   v(x) = (C + (1-m)/(2m-1) |x|^2)^(-1/(1-m)),
// with C chosen so the grid mass equals M (bisection, 1e-10 relative).
BarenblattS0 barenblatt_s0(const Grid& g, double m, double M,
                           double boundary_tol = 1e-3);

struct SpecialStationary {
    Field v;
    double amplitude;      // A applied to the base profile
    double lambda;         // dilation selecting the requested mass
    double fit_rel_error;  // residual of the proportionality fit (diagnostic)
};

// Stationary profile of the rescaled flow at the special m = special_m(d, s),
// built from the closed-form shape (1 + |x|^2)^(1/(1-p)): the amplitude is
// fixed by a least-squares fit of the stationarity balance for the base
// shape and the dilation by the requested mass, both applied analytically.
SpecialStationary special_stationary_profile(const Grid& g, const ModelParams& p);

//---------------------------------------------------------------------------
// Self-similar change of variables.
//---------------------------------------------------------------------------

// R(t) = (1 + mu t)^(1/mu); requires 1 + mu t > 0.
double scale_R(double t, double mu);

enum class RescaleDirection { to_rescaled, to_original };

// Maps between the original-frame solution at time t and the rescaled-frame
// one via u(t,x) = R^-d v(log R, x/R), by spectral resampling. Refuses when
// the input carries more than boundary_tol of its mass in the outer half of
// the box, since resampling would wrap it around.
Field rescale(const Field& u, double t, double mu, RescaleDirection dir,
              double boundary_tol = 1e-3);

// Entropy-power production bound kappa = 2m/(2m-1) (m-mc) (M/C^2p)^(1/(p theta)).
double kappa(const DerivedExponents& e, double M, double c_gns);

// Slope of the entropy power along the self-similar solution: mu * F[B].
double kappa_star(const DerivedExponents& e, double renyi_of_profile);

}  // namespace fraflow
