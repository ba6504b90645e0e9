#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>

#include "ftcy/geometry.hpp"

namespace ftcy {

using Complex = std::complex<double>;

// Forward-transform memo managed by the spectral engine.  Valid only while
// the sample array is bit-identical to the snapshot, so in-place edits of a
// field simply invalidate it.  Keeping the coefficients alongside the
// samples lets solve/differentiate chains compose at the spectral level,
// without the k^2-amplified round-trip noise of a fresh transform.
struct SpectrumCache {
  Eigen::ArrayXcd snapshot;
  Eigen::ArrayXcd hat;
};

// Periodic grid function with complex samples, row-major over the active
// axes.  Samples stay complex even for real-valued fields; realness is a
// checked property, not a type.
struct ScalarField {
  TorusGeometry geom;
  Eigen::ArrayXcd values;
  mutable std::shared_ptr<const SpectrumCache> spectrum;

  ScalarField() = default;
  ScalarField(TorusGeometry g, Eigen::ArrayXcd v);
};

// Spectral-memo plumbing (used by the spectral engine and scalar scaling).
const Eigen::ArrayXcd* fetch_spectrum(const ScalarField& f);
void attach_spectrum(const ScalarField& f, Eigen::ArrayXcd hat);

ScalarField constant_field(const TorusGeometry& g, Complex value);

// Samples fn at the grid points; fn receives all 2n real coordinates.
ScalarField sample_field(const TorusGeometry& g,
                         const std::function<Complex(const std::vector<double>&)>& fn);

Complex field_mean(const ScalarField& f);
double max_abs(const ScalarField& f);

// Max imaginary magnitude relative to the field scale.
double imag_defect(const ScalarField& f);
bool is_real(const ScalarField& f, double rel_tol = 1e-12);

// Throws numeric_error when the field is not real to rel_tol.
Eigen::ArrayXd real_part_checked(const ScalarField& f, double rel_tol = 1e-12);

ScalarField conj(const ScalarField& f);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator*(Complex s, const ScalarField& a);
ScalarField operator+(const ScalarField& a, Complex s);
ScalarField operator-(const ScalarField& a, Complex s);

ScalarField log_field(const ScalarField& a);   // entrywise log of real positive
ScalarField exp_field(const ScalarField& a);

void require_same_geometry(const TorusGeometry& a, const TorusGeometry& b);

}  // namespace ftcy
