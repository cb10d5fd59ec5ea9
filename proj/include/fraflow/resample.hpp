#pragma once

#include "fraflow/grid.hpp"

namespace fraflow {

// Evaluates the trigonometric interpolant of u at the scaled points R*x for
// every grid point x, axis by axis (the Nyquist mode is treated as a cosine
// so the result is real). Points outside the box wrap periodically, so the
// caller is responsible for checking that u has decayed near the boundary.
Field resample_scaled(const Field& u, double R);

}  // namespace fraflow
