#pragma once

#include "ftcy/form_algebra.hpp"

namespace ftcy {

// Explicit balanced, hermitian-Ricci-flat solutions on the torus: for
// delta in (0,1) build a real (n-2,n-2)-form phi in the cone of the
// standard background with
//   det(Psi_0 + F_phi) = delta det(Psi_0)
// from the one-dimensional ansatz u(x_1), v(x_1) = -4k sin x_1 with
// (1 + lap u)(1 + lap v) = delta.

struct ConstructionParams {
  int n = 3;
  double delta = 0.5;
  int grid = 256;          // grid size on the single active axis x_1
  double tol = 1e-10;
};

struct ConstructionResiduals {
  double det_identity = 0.0;      // relative residual of the determinant identity
  double positivity_margin = 0.0; // min(1 + lap u, 1 + lap v) over the grid
  double ricci_sup = 0.0;
  double c0_constancy = 0.0;      // sup |(norm of Omega) - C0|
};

struct ConstructionResult {
  ConstructionParams params;
  double k = 0.0;
  ScalarField u, v;
  FormN2 phi;
  MetricField omega;
  double C0 = 0.0;
  double min_one_plus_lap_u = 0.0;
  double min_one_plus_lap_v = 0.0;
  ConstructionResiduals residuals;
};

// Z(k) = (1/2pi) integral of 1/(1 + k sin x) over a period; monotone
// increasing with Z(0) = 1 and Z -> infinity as k -> 1.
double z_integral(double k);

// The unique k in (0,1) with Z(k) = 1/delta, found by bisection.
double solve_k(double delta);

ScalarField build_v(double k, const TorusGeometry& g);

// Solves 1 + lap u = delta / (1 + k sin x_1); requires Z(k) = 1/delta so
// the right-hand side is mean-zero.
ScalarField build_u(double delta, double k, const TorusGeometry& g);

// The two-component sparse form {P = {3..n} -> u, P = {2,4..n} -> v}.
FormN2 assemble_phi(const ScalarField& u, const ScalarField& v, int n);

ConstructionResult construct(const ConstructionParams& params);

// Product variant: a constant positive factor metric on the first
// n - k_torus complex directions wedged with the torus construction on the
// remaining k_torus >= 3.  factor_metric may be 0 x 0 (reduces to construct).
ConstructionResult construct_product(const ConstructionParams& params,
                                     const Eigen::MatrixXcd& factor_metric);

}  // namespace ftcy
