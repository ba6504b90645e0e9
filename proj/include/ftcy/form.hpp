#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "ftcy/field.hpp"

namespace ftcy {

// Real (n-2,n-2)-form with sparse components phi_{P,Q} indexed by
// (n-2)-element subsets P, Q of {1..n} (bitmask, bit i-1 for index i).
//
// The stored component is the coefficient against the basis monomial
//   (n-1)! (i/2)^{n-2} sigma_m dz_P ^ dzbar_Q,   m = n-2,
// where sigma_m = (-1)^{m(m-1)/2} makes the diagonal (P == Q) monomial the
// ascending interleaved product dz_p ^ dzbar_p ^ ...  With this choice the
// two-term construction below is literally {u at P = {3..n}, v at
// P = {2,4..n}}, each with unit coefficient.
//
// Reality: phi_{P,Q} = conj(phi_{Q,P}).
struct FormN2 {
  TorusGeometry geom;
  int n = 0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, ScalarField> comps;

  FormN2() = default;
  FormN2(TorusGeometry g, int n);

  void add(std::uint32_t P, std::uint32_t Q, const Eigen::ArrayXcd& values);
  void add(std::uint32_t P, std::uint32_t Q, const ScalarField& f);
};

// All k-element subsets of {1..n} as bitmasks, ascending.
std::vector<std::uint32_t> subsets_of_size(int n, int k);
std::uint32_t mask_of(std::initializer_list<int> indices);
std::vector<int> indices_of(std::uint32_t mask);

// max |phi_PQ - conj(phi_QP)| relative to the form scale.
double reality_defect(const FormN2& phi);

FormN2 operator+(const FormN2& a, const FormN2& b);
FormN2 operator*(Complex s, const FormN2& a);

}  // namespace ftcy
