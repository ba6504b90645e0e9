#include "ftcy/form.hpp"

#include "ftcy/errors.hpp"

namespace ftcy {

FormN2::FormN2(TorusGeometry g, int nn) : geom(std::move(g)), n(nn) {}

void FormN2::add(std::uint32_t P, std::uint32_t Q, const ScalarField& f) {
  require_same_geometry(geom, f.geom);
  if (__builtin_popcount(P) != n - 2 || __builtin_popcount(Q) != n - 2)
    throw usage_error("component index sets must have n-2 elements");
  auto key = std::make_pair(P, Q);
  auto it = comps.find(key);
  if (it == comps.end())
    comps.emplace(key, f);
  else
    it->second = it->second + f;
}

void FormN2::add(std::uint32_t P, std::uint32_t Q, const Eigen::ArrayXcd& values) {
  add(P, Q, ScalarField{geom, values});
}

std::vector<std::uint32_t> subsets_of_size(int n, int k) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m < (1u << n); ++m)
    if (__builtin_popcount(m) == k) out.push_back(m);
  return out;
}

std::uint32_t mask_of(std::initializer_list<int> indices) {
  std::uint32_t m = 0;
  for (int i : indices) m |= 1u << (i - 1);
  return m;
}

std::vector<int> indices_of(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1u) out.push_back(i + 1);
  return out;
}

double reality_defect(const FormN2& phi) {
  double scale = 0.0;
  for (const auto& [key, v] : phi.comps)
    if (v.values.size()) scale = std::max(scale, v.values.abs().maxCoeff());
  if (scale == 0.0) return 0.0;
  double d = 0.0;
  for (const auto& [key, v] : phi.comps) {
    auto mirror = phi.comps.find({key.second, key.first});
    if (mirror == phi.comps.end()) {
      d = std::max(d, v.values.abs().maxCoeff());
    } else {
      d = std::max(d, (v.values - mirror->second.values.conjugate()).abs().maxCoeff());
    }
  }
  return d / scale;
}

FormN2 operator+(const FormN2& a, const FormN2& b) {
  require_same_geometry(a.geom, b.geom);
  FormN2 r = a;
  for (const auto& [key, v] : b.comps) r.add(key.first, key.second, v);
  return r;
}

FormN2 operator*(Complex s, const FormN2& a) {
  FormN2 r = a;
  for (auto& [key, v] : r.comps) v = s * v;
  return r;
}

}  // namespace ftcy
