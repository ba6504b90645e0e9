#pragma once

#include <functional>

#include "ftcy/field.hpp"

namespace ftcy {

// FFT-based calculus on periodic grids.
//
// Conventions: z_i = x_{2i-1} + sqrt(-1) x_{2i}, so
//   d/dz_i    = (d/dx_{2i-1} - sqrt(-1) d/dx_{2i}) / 2,
//   d/dzbar_i = (d/dx_{2i-1} + sqrt(-1) d/dx_{2i}) / 2.
// First-order derivatives zero the Nyquist mode; pure second-order
// multipliers (-k^2) keep it.  Derivatives along inactive axes vanish.

// Applies a Fourier multiplier; fn receives the integer wavenumber for every
// real axis 1..2n (0 on inactive axes, Nyquist reported as -N/2).
ScalarField apply_multiplier(
    const ScalarField& f,
    const std::function<Complex(const std::vector<int>&)>& fn);

// d^order/dx_axis^order, spectrally.  order 1 or 2.
ScalarField axis_derivative(const ScalarField& f, int axis, int order = 1);

ScalarField wirtinger_d(const ScalarField& f, int i);
ScalarField wirtinger_dbar(const ScalarField& f, int i);

// Mixed Wirtinger second derivative d^2/(dz_p dzbar_q).  For p == q the
// real multiplier -(k_x^2 + k_y^2)/4 is used so the operator is exactly
// invertible against solve_dzdzbar.
ScalarField wirtinger_hessian(const ScalarField& f, int p, int q);

// d^2/(dz_i dzbar_i), the flat Laplacian of the i-th complex direction.
ScalarField dzdzbar(const ScalarField& f, int i);

// Inverts dzdzbar on mean-zero data.  Throws numeric_error when the rhs has
// a mean above rel_tol or varies along axes the operator cannot see.
ScalarField solve_dzdzbar(const ScalarField& rhs, int i, double rel_tol = 1e-10);

// Sum over all complex directions of dzdzbar, and its inverse on mean-zero
// data (used as the solver preconditioner).
ScalarField flat_laplacian(const ScalarField& f);
ScalarField solve_flat_laplacian(const ScalarField& rhs);

// Drops spectral coefficients below rel_tol times the largest one; numbers
// at that level are transform roundoff, and differentiating them
// manufactures O(eps N^2) noise.  Intended for fields known to be
// band-limited (sampled trigonometric data).
ScalarField spectral_clean(const ScalarField& f, double rel_tol = 1e-13);

// Periodic trapezoid rule: mean * (2 pi)^{2n}.  Exact for band-limited data.
Complex integrate(const ScalarField& f);

ScalarField mean_zero_project(const ScalarField& f);

}  // namespace ftcy
