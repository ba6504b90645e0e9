#pragma once

#include <optional>

#include "ftcy/field.hpp"

namespace ftcy {

// n x n complex-matrix-valued grid function, stored as n*n scalar planes
// (entry (i,j) at plane i*n + j, 0-based).  Hermitian at every grid point
// up to a checked tolerance.
struct HermitianField {
  TorusGeometry geom;
  int n = 0;
  std::vector<Eigen::ArrayXcd> planes;

  HermitianField() = default;
  HermitianField(TorusGeometry g, int n);

  Eigen::ArrayXcd& plane(int i, int j) { return planes[i * n + j]; }
  const Eigen::ArrayXcd& plane(int i, int j) const { return planes[i * n + j]; }

  Eigen::MatrixXcd at(std::int64_t idx) const;
  void set(std::int64_t idx, const Eigen::MatrixXcd& m);
};

HermitianField constant_matrix_field(const TorusGeometry& g, const Eigen::MatrixXcd& m);
HermitianField operator+(const HermitianField& a, const HermitianField& b);
HermitianField operator-(const HermitianField& a, const HermitianField& b);
HermitianField operator*(Complex s, const HermitianField& a);

double field_max_abs(const HermitianField& f);

// max |M - M^H| over the grid, relative to the field scale.
double hermiticity_defect(const HermitianField& f);
HermitianField hermitize(const HermitianField& f);

// Mean of every entry over the grid.
Eigen::MatrixXcd entry_means(const HermitianField& f);
HermitianField subtract_constant(const HermitianField& f, const Eigen::MatrixXcd& m);

ScalarField det_field(const HermitianField& f);
ScalarField trace_field(const HermitianField& f);

struct PositivityReport {
  bool positive = false;
  double min_pivot_rel = 0.0;     // min Cholesky pivot / pointwise scale
  std::int64_t first_failure = -1;
  std::vector<int> failure_index;  // grid multi-index of the first failure
};

// Pointwise Cholesky (LDLT) with relative pivot threshold.
PositivityReport check_positive_definite(const HermitianField& f, double rel_tol = 1e-12);

// Pointwise positive definite metric coefficients g_{i jbar}.
struct MetricField {
  HermitianField g;
  double positivity_margin = 0.0;
};

// Certifies positivity; throws numeric_error on failure.
MetricField make_metric(HermitianField g, double rel_tol = 1e-12);
MetricField standard_metric(const TorusGeometry& g);

// Coefficient matrix of an (n-1,n-1)-form against the signed basis; carries
// the outcome of the positivity certificate when requested.
struct PsiField {
  HermitianField m;
  bool positive = false;
  PositivityReport cert;
};

// Constant nowhere-vanishing holomorphic n-form: scale * dz_1 ^ ... ^ dz_n.
struct HolomorphicVolume {
  Complex scale{1.0, 0.0};
};

}  // namespace ftcy
