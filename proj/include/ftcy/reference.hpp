#pragma once

#include <random>

#include "ftcy/form.hpp"
#include "ftcy/matrix_field.hpp"

namespace ftcy {
namespace ref {

// Slow, independent reference machinery used by the verification suite and
// the tests.  Nothing here shares code with the production paths: signs come
// from direct inversion counting and derivatives are taken analytically on
// trigonometric mode sums.

// Finite sum of Fourier modes  sum_k c_k exp(i m_k . x)  over the 2n real
// coordinates.
struct Mode {
  std::vector<int> m;  // size 2n
  Complex c;
};

struct ModeField {
  int n = 0;
  std::vector<Mode> modes;

  Complex eval(const std::vector<double>& x) const;
  ModeField dz(int i) const;     // analytic d/dz_i
  ModeField dzbar(int i) const;  // analytic d/dzbar_i
  ModeField conjugate() const;
};

ScalarField to_grid(const ModeField& f, const TorusGeometry& g);

// Permutation sign by counting inversions; 0 when an entry repeats.
int inversion_sign(const std::vector<int>& keys);

// A sparse (n-2,n-2)-form with analytic components, mirroring FormN2.
struct ModeForm {
  int n = 0;
  std::vector<std::tuple<std::uint32_t, std::uint32_t, ModeField>> comps;
};

FormN2 to_grid(const ModeForm& phi, const TorusGeometry& g);

// Brute-force expansion of (i/2) ddbar(phi) at the point x: every component
// is differentiated analytically, wedge monomials are reduced by inversion
// counting, and the (n-1,n-1) coefficients are read off against the signed
// basis.  sign_flip / drop_factorial / break_mean exist for mutation tests.
struct OracleMutation {
  bool flip_sign = false;       // negate s(p,q)
  bool drop_factorial = false;  // forget the (n-1)! basis normalization
  double mean_shift = 0.0;      // additive constant injected into the result
};

Eigen::MatrixXcd ddbar_oracle_at(const ModeForm& phi, const std::vector<double>& x,
                                 const OracleMutation& mut = {});

// Brute-force wedge of n-1 (1,1)-forms with constant coefficient matrices:
// returns the (n-1,n-1) coefficient matrix against the signed basis.
Eigen::MatrixXcd psi_oracle(const std::vector<Eigen::MatrixXcd>& factors);

// Random generators (deterministic under the given engine).
ScalarField random_band_limited(const TorusGeometry& g, int max_mode, double amplitude,
                                bool real_valued, std::mt19937_64& rng);
ModeField random_mode_field(const TorusGeometry& g, int max_mode, double amplitude,
                            std::mt19937_64& rng);
HermitianField random_hermitian_field(const TorusGeometry& g, int n, int max_mode,
                                      double amplitude, std::mt19937_64& rng);
Eigen::MatrixXcd random_spd_matrix(int n, std::mt19937_64& rng);

struct RandomForm {
  FormN2 grid;
  ModeForm modes;
};
RandomForm random_real_form(const TorusGeometry& g, int n, int max_mode,
                            double amplitude, std::mt19937_64& rng);

// Composite 4th-order centered finite difference along a real axis.
ScalarField fd_axis_derivative(const ScalarField& f, int axis);

// Rescales I + B pointwise so its determinant is the constant c, then
// restores exact mean-zero entries.  The two constraints cannot hold
// together unless B vanishes; the output keeps mean-zero exact and the
// determinant approximately c.
HermitianField renormalize_det_to_constant(const HermitianField& B, double c);

// Adaptive periodic trapezoid quadrature of fn over [0, 2pi), refined until
// stable; used as the independent oracle for Z(k).
double trapezoid_1d(const std::function<double(double)>& fn, int initial_n = 64,
                    double rel_tol = 1e-13);

}  // namespace ref
}  // namespace ftcy
