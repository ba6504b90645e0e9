#include "ftcy/wedge.hpp"

#include <algorithm>

#include "ftcy/errors.hpp"
#include "ftcy/spectral.hpp"

namespace ftcy {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// (i/2)^k computed exactly: i^k cycles with period 4.
Complex i_over_2_pow(int k) {
  static const Complex cycle[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return cycle[k % 4] / std::pow(2.0, k);
}

// sigma_m: parity of reordering dz_P ^ dzbar_P (separated, ascending) into
// the interleaved product dz_p ^ dzbar_p ^ ...
int separated_to_interleaved_sign(int m) {
  return (m * (m - 1) / 2) % 2 == 0 ? 1 : -1;
}

}  // namespace

int sort_keys(std::vector<int>& keys) {
  int sign = 1;
  for (std::size_t i = 1; i < keys.size(); ++i)
    for (std::size_t j = i; j > 0 && keys[j - 1] > keys[j]; --j) {
      std::swap(keys[j - 1], keys[j]);
      sign = -sign;
    }
  for (std::size_t i = 1; i < keys.size(); ++i)
    if (keys[i - 1] == keys[i]) return 0;
  return sign;
}

int sign_pq(int p, int q) { return p <= q ? 1 : -1; }

void SparseForm::add_term(std::vector<int> keys, ScalarField coeff) {
  int sign = sort_keys(keys);
  if (sign == 0) return;
  if (sign < 0) coeff = Complex(-1.0, 0.0) * coeff;
  auto it = terms.find(keys);
  if (it == terms.end())
    terms.emplace(std::move(keys), std::move(coeff));
  else
    it->second = it->second + coeff;
}

void SparseForm::prune(double abs_tol) {
  for (auto it = terms.begin(); it != terms.end();) {
    if (max_abs(it->second) <= abs_tol)
      it = terms.erase(it);
    else
      ++it;
  }
}

SparseForm oneone_form(const HermitianField& g) {
  SparseForm f(g.geom, g.n);
  const Complex half_i = i_over_2_pow(1);
  for (int p = 1; p <= g.n; ++p)
    for (int q = 1; q <= g.n; ++q)
      f.add_term({2 * p - 1, 2 * q},
                 {g.geom, half_i * g.plane(p - 1, q - 1)});
  return f;
}

SparseForm oneone_form(const TorusGeometry& geom, const Eigen::MatrixXcd& m) {
  return oneone_form(constant_matrix_field(geom, m));
}

SparseForm expand(const FormN2& phi) {
  SparseForm f(phi.geom, phi.n);
  const int m = phi.n - 2;
  const Complex norm = factorial(phi.n - 1) * i_over_2_pow(m) *
                       static_cast<double>(separated_to_interleaved_sign(m));
  for (const auto& [key, field] : phi.comps) {
    std::vector<int> keys;
    for (int p : indices_of(key.first)) keys.push_back(2 * p - 1);
    for (int q : indices_of(key.second)) keys.push_back(2 * q);
    f.add_term(std::move(keys), norm * field);
  }
  return f;
}

SparseForm wedge(const SparseForm& a, const SparseForm& b) {
  require_same_geometry(a.geom, b.geom);
  SparseForm r(a.geom, a.n);
  for (const auto& [ka, ca] : a.terms)
    for (const auto& [kb, cb] : b.terms) {
      std::vector<int> keys = ka;
      keys.insert(keys.end(), kb.begin(), kb.end());
      // cheap duplicate rejection before the pointwise multiply
      std::vector<int> sorted = keys;
      if (sort_keys(sorted) == 0) continue;
      r.add_term(std::move(keys), ca * cb);
    }
  return r;
}

SparseForm wedge_power(const SparseForm& a, int p) {
  SparseForm r(a.geom, a.n);
  r.terms.emplace(std::vector<int>{}, constant_field(a.geom, 1.0));
  for (int i = 0; i < p; ++i) r = wedge(r, a);
  return r;
}

SparseForm d(const SparseForm& a) {
  SparseForm r(a.geom, a.n);
  for (const auto& [keys, coeff] : a.terms)
    for (int i = 1; i <= a.n; ++i) {
      int key = 2 * i - 1;
      if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
      ScalarField df = wirtinger_d(coeff, i);
      std::vector<int> nk;
      nk.reserve(keys.size() + 1);
      nk.push_back(key);
      nk.insert(nk.end(), keys.begin(), keys.end());
      r.add_term(std::move(nk), std::move(df));
    }
  return r;
}

SparseForm dbar(const SparseForm& a) {
  SparseForm r(a.geom, a.n);
  for (const auto& [keys, coeff] : a.terms)
    for (int i = 1; i <= a.n; ++i) {
      int key = 2 * i;
      if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
      ScalarField df = wirtinger_dbar(coeff, i);
      std::vector<int> nk;
      nk.reserve(keys.size() + 1);
      nk.push_back(key);
      nk.insert(nk.end(), keys.begin(), keys.end());
      r.add_term(std::move(nk), std::move(df));
    }
  return r;
}

SparseForm scale(const SparseForm& a, Complex s) {
  SparseForm r = a;
  for (auto& [keys, coeff] : r.terms) coeff = s * coeff;
  return r;
}

ScalarField top_density(const SparseForm& a) {
  std::vector<int> full(2 * a.n);
  for (int i = 0; i < 2 * a.n; ++i) full[i] = i + 1;
  auto it = a.terms.find(full);
  if (it == a.terms.end()) return constant_field(a.geom, 0.0);
  return (1.0 / i_over_2_pow(a.n)) * it->second;
}

HermitianField extract_psi(const SparseForm& a) {
  const int n = a.n;
  HermitianField psi(a.geom, n);
  const Complex norm = factorial(n - 1) * i_over_2_pow(n - 1);
  for (int p = 1; p <= n; ++p)
    for (int q = 1; q <= n; ++q) {
      std::vector<int> keys;
      for (int k = 1; k <= 2 * n; ++k)
        if (k != 2 * p - 1 && k != 2 * q) keys.push_back(k);
      auto it = a.terms.find(keys);
      if (it == a.terms.end()) continue;
      psi.plane(p - 1, q - 1) =
          it->second.values * (static_cast<double>(sign_pq(p, q)) / norm);
    }
  return psi;
}

}  // namespace ftcy
