#pragma once

#include <map>

#include "ftcy/form.hpp"
#include "ftcy/matrix_field.hpp"

namespace ftcy {

// Exterior algebra over the generators dz_1, dzbar_1, ..., dz_n, dzbar_n
// with field-valued coefficients.  Generator keys: dz_i -> 2i-1,
// dzbar_i -> 2i; monomials are ascending key lists and every sign comes from
// the sorting parity, never from a hand-written table.

// Sorts keys ascending, returns the permutation sign, or 0 when a key
// repeats (the monomial vanishes).
int sort_keys(std::vector<int>& keys);

// s(p,q) = 1 for p <= q, -1 for p > q.  Chosen so that
// dz_p ^ dzbar_q ^ s(p,q) e(p,q) equals the full volume monomial, where
// e(p,q) omits dz_p and dzbar_q from the interleaved product.
int sign_pq(int p, int q);

struct SparseForm {
  TorusGeometry geom;
  int n = 0;
  // ascending key list -> absolute coefficient field
  std::map<std::vector<int>, ScalarField> terms;

  SparseForm() = default;
  SparseForm(TorusGeometry g, int n) : geom(std::move(g)), n(n) {}

  // Adds coeff * (monomial of keys); keys need not be sorted.
  void add_term(std::vector<int> keys, ScalarField coeff);
  void prune(double abs_tol = 0.0);
};

// (i/2) sum g_{p qbar} dz_p ^ dzbar_q.
SparseForm oneone_form(const HermitianField& g);
SparseForm oneone_form(const TorusGeometry& geom, const Eigen::MatrixXcd& m);

// FormN2 with its storage normalization made explicit.
SparseForm expand(const FormN2& phi);

SparseForm wedge(const SparseForm& a, const SparseForm& b);
SparseForm wedge_power(const SparseForm& a, int p);

SparseForm d(const SparseForm& a);     // sum_a dz_a ^ d_a(coeff)
SparseForm dbar(const SparseForm& a);  // sum_b dzbar_b ^ dbar_b(coeff)

SparseForm scale(const SparseForm& a, Complex s);

// Coefficient of an (n,n)-form relative to dV = (i/2)^n dz_1 ^ dzbar_1 ...
ScalarField top_density(const SparseForm& a);

// Coefficients Theta_{p qbar} of an (n-1,n-1)-form against the signed basis
//   (i/2)^{n-1} (n-1)! sum Theta_{p qbar} s(p,q) e(p,q).
HermitianField extract_psi(const SparseForm& a);

}  // namespace ftcy
