#pragma once

#include <string>

#include "ftcy/form.hpp"
#include "ftcy/matrix_field.hpp"

namespace ftcy {

// The pointwise dictionary between a positive (1,1)-form omega and the
// coefficient matrix Psi of omega^{n-1}:
//   Psi_{i jbar} = det(g) g^{i jbar},   g^{i jbar} = transposed inverse,
//   det omega    = (det Psi)^{1/(n-1)}.

PsiField power_map(const MetricField& omega);

// Inverse of power_map; throws numeric_error when psi is not pointwise
// positive definite (the form leaves the cone).
MetricField root_extract(const PsiField& psi, double rel_tol = 1e-12);
MetricField root_extract(const HermitianField& psi, double rel_tol = 1e-12);

// Coefficient matrix F_phi of (i/2) ddbar(phi) against the signed
// (n-1,n-1) basis.  phi must be real; every entry of the result is
// mean-zero.  Signs are generated from wedge-order parity.
HermitianField ddbar_to_hermitian(const FormN2& phi, double reality_tol = 1e-10);

// psi0 + F with a positivity certificate attached; non-positivity is data,
// not an error (the tag stays false and the report records the first
// failing grid point).
PsiField perturb(const PsiField& psi0, const HermitianField& F, double rel_tol = 1e-12);

// |Omega|^2 with respect to omega, normalized so the standard metric gives
// |dz_1 ^ ... ^ dz_n| = 1:  |Omega|^2 = |scale|^2 / det g.
ScalarField omega_norm_sq(const MetricField& omega, const HolomorphicVolume& Omega);

// Ricci curvature of the hermitian connection, computed spectrally:
//   R_{k lbar} = - d^2 log(det g) / (dz_k dzbar_l).
HermitianField ricci_hermitian(const MetricField& omega);

// Constant matrix A with A Psi A^H = I for constant positive definite Psi.
Eigen::MatrixXcd normalize_to_identity(const Eigen::MatrixXcd& psi, double tol = 1e-12);

// Arithmetic-geometric mean chain for a mean-zero hermitian perturbation B
// with I + B > 0 and claimed det(I + B) = c:
//   gap = tr(I+B)/n - det(I+B)^{1/n} >= 0 pointwise,
// and the mean-zero trace forces the volume average of tr(I+B)/n to be 1,
// so a constant determinant c >= 1 is only consistent with B = 0.
struct AmgmReport {
  double max_pointwise_gap = 0.0;
  double gap_integral = 0.0;  // integral of the gap over the torus
  double gap_mean = 0.0;      // volume average of the gap
  double det_claim_defect = 0.0;
  double sup_b = 0.0;
  std::string verdict;  // "rigid" | "contradiction" | "hypothesis-violated"
};

AmgmReport amgm_report(const HermitianField& B, double c, double tol = 1e-9);

// Structured-text (key = value) emission for reports and constant matrices.
std::string to_kv_text(const AmgmReport& rep, const std::string& prefix = "amgm");
std::string to_kv_text(const Eigen::MatrixXcd& m, const std::string& name);

}  // namespace ftcy
