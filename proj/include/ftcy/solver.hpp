#pragma once

#include <optional>

#include "ftcy/form_algebra.hpp"

namespace ftcy {

// The nonlinear map
//   M(psi) = log(omega_psi^n / omega_0^n) - log(int omega_psi^n / V),
// its restriction to the ansatz psi = u eta^{n-2}, the linearization L,
// the bilinear form A, a preconditioned Krylov solver for L u = h, and a
// damped Newton continuation for M = f.

struct Background {
  MetricField omega0;
  Eigen::MatrixXcd eta;  // constant Kaehler reference metric
  HolomorphicVolume Omega;
  PsiField psi0;     // power_map(omega0)
  ScalarField det0;  // det of omega0 coefficients
  double V = 0.0;    // int omega0^n

  // Response of the (n-1,n-1) coefficients of eta^{n-2} ^ omega to each
  // metric entry: Theta_{p qbar} = sum_{a,b} theta[a*n+b]_{p qbar} g_{a bbar}.
  std::vector<Eigen::MatrixXcd> theta_tensor;
};

Background make_background(const TorusGeometry& geom);
Background make_background(MetricField omega0, Eigen::MatrixXcd eta,
                           HolomorphicVolume Omega = {});

// Source term f with the compatibility normalization int e^f omega0^n = V
// applied on ingest.
struct SourceTerm {
  ScalarField f;
};
SourceTerm make_source(const ScalarField& f, const Background& bg);
double compatibility_defect(const ScalarField& f, const Background& bg);

// Cone point u together with everything derived from it.
struct AnsatzState {
  ScalarField u;          // mean-zero with respect to omega_phi^n
  FormN2 psi;             // u eta^{n-2}
  HermitianField F;       // ddbar coefficients of psi
  PsiField Psi;           // Psi_0 + F, certified positive
  MetricField omega;      // root_extract(Psi)
  ScalarField det_g;      // det omega coefficients (real)
  double Vphi = 0.0;      // int omega_phi^n
  HermitianField theta;   // coefficients of eta^{n-2} ^ omega_phi
};

// Builds the state; throws numeric_error when u leaves the cone.
AnsatzState make_ansatz(const ScalarField& u, const Background& bg);

FormN2 ansatz_form(const ScalarField& u, const Background& bg);

double weighted_mean(const ScalarField& f, const ScalarField& w);
ScalarField project_weighted(const ScalarField& f, const ScalarField& w);

ScalarField m_map(const FormN2& phi, const Background& bg);
ScalarField m_map(const AnsatzState& state, const Background& bg);

// Frechet derivative of G(phi) = omega_phi^n in the direction psi, returned
// as the density of the (n,n)-form against dV.
ScalarField linearize_G(const FormN2& psi_dir, const AnsatzState& at, const Background& bg);

// L u = M'(u eta^{n-2}); evaluated through the hermitian-trace identity
// against the cached coefficients of eta^{n-2} ^ omega_phi.
ScalarField apply_L(const ScalarField& dir, const AnsatzState& at, const Background& bg);

// The weak-form bilinear map; for mean-zero arguments A(u,v) = -<Lu, v>.
double bilinear_A(const ScalarField& u, const ScalarField& v, const AnsatzState& at,
                  const Background& bg);

struct LinearConfig {
  double rel_tol = 1e-10;
  int max_iters = 500;
  std::optional<ScalarField> initial_guess;
};

struct LinearResult {
  ScalarField u;
  int iterations = 0;
  double residual = 0.0;  // max-norm of L u - h relative to |h|
  std::vector<double> history;
};

// Solves L u = h on the mean-zero subspace by preconditioned GMRES
// (constant-coefficient inverse Laplacian as the preconditioner).
LinearResult solve_L(const ScalarField& h, const AnsatzState& at, const Background& bg,
                     const LinearConfig& cfg = {});

struct NewtonConfig {
  double newton_tol = 1e-8;
  int max_iters = 60;           // total Newton iterations across continuation
  int continuation_steps = 8;
  double lin_rel_tol = 1e-10;
  int lin_max_iters = 500;
  std::optional<ScalarField> initial_guess;
};

struct NewtonHistoryRow {
  double t = 0.0;
  int iteration = 0;
  double residual = 0.0;
  double damping = 1.0;
};

struct NewtonResult {
  AnsatzState state;
  std::vector<NewtonHistoryRow> history;
  int iterations = 0;
  double residual = 0.0;
  // residual sequence of the final continuation stage, for order estimates
  std::vector<double> final_stage_residuals;
};

NewtonResult newton_solve(const SourceTerm& f, const Background& bg,
                          const NewtonConfig& cfg = {});

// Smallest singular value of L restricted to mean-zero functions, estimated
// by inverse iteration through solve_L.
double kernel_margin(const AnsatzState& at, const Background& bg, int iterations = 40,
                     std::uint64_t seed = 1);

}  // namespace ftcy
