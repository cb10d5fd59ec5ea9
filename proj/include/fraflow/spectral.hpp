#pragma once

#include <complex>
#include <vector>

#include "fraflow/grid.hpp"

namespace fraflow {

using Spectrum = std::vector<std::complex<double>>;

//---------------------------------------------------------------------------
// Transforms. Forward is the raw DFT sum; inverse divides by the point count,
// so inverse(forward(w)) == w. Under this normalization Parseval reads
//   h^d sum_x w^2 = (h^d / N) sum_xi |what|^2.
//---------------------------------------------------------------------------
Spectrum forward_fft(const Field& w);
Field inverse_fft(const Grid& g, const Spectrum& s);

//---------------------------------------------------------------------------
// Fourier multiplier operators on [-L, L)^d with frequencies xi_k = pi*k/L.
// All differential operators zero the Nyquist planes (any axis index n/2):
// odd symbols cannot be represented there with a real result, and dropping
// the plane uniformly keeps compositions like div(grad) = laplacian exact.
//---------------------------------------------------------------------------

// (-Delta)^beta, symbol |xi|^(2*beta); the zero mode is annihilated for
// beta != 0 and the field returned unchanged for beta == 0.
Field frac_laplacian(const Field& w, double beta);

// grad (-Delta)^(-s), component symbols i*xi_j*|xi|^(-2s); s = 0 is the
// plain gradient.
VectorField riesz_gradient(const Field& w, double s);
VectorField gradient(const Field& w);

// Divergence of a vector field; the result has exactly zero mean.
Field divergence(const VectorField& V);

// Hessian, symbols -xi_a*xi_b.
MatrixField hessian(const Field& w);

// (a (-Delta)^beta + c)^(-1), a >= 0, c > 0; used as a preconditioned
// fixed-point sweep when solving optimality balances.
Field resolvent_frac_laplacian(const Field& w, double beta, double a, double c);

// Smooth radial low-pass: modes with |xi| <= (cut - width) * xi_nyquist pass
// unchanged, modes with |xi| >= cut * xi_nyquist are removed, with a
// smoothstep roll-off between. Confines a field to the resolved band.
Field lowpass(const Field& w, double cut, double width);

//---------------------------------------------------------------------------
// Quadrature and norms (deterministic pairwise reductions).
//---------------------------------------------------------------------------
double integrate(const Field& w);
double inner(const Field& a, const Field& b);
// (h^d sum |w|^r)^(1/r), r >= 1.
double lp_norm(const Field& w, double r);
// Squared homogeneous Sobolev seminorm inner(w, (-Delta)^(alpha/2) w),
// alpha in (0, 2].
double hs_seminorm(const Field& w, double alpha);
// Fraction of integrate(|w|) carried by points with max_j |x_j| > L/2.
double boundary_mass_fraction(const Field& w);

}  // namespace fraflow
