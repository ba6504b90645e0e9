#include "ftcy/field.hpp"

#include <cstring>

#include "ftcy/errors.hpp"

namespace ftcy {

ScalarField::ScalarField(TorusGeometry g, Eigen::ArrayXcd v)
    : geom(std::move(g)), values(std::move(v)) {
  if (values.size() != geom.total_points())
    throw usage_error("sample count does not match grid");
}

const Eigen::ArrayXcd* fetch_spectrum(const ScalarField& f) {
  if (!f.spectrum) return nullptr;
  if (f.spectrum->snapshot.size() != f.values.size()) return nullptr;
  if (std::memcmp(f.spectrum->snapshot.data(), f.values.data(),
                  sizeof(Complex) * f.values.size()) != 0)
    return nullptr;
  return &f.spectrum->hat;
}

void attach_spectrum(const ScalarField& f, Eigen::ArrayXcd hat) {
  auto cache = std::make_shared<SpectrumCache>();
  cache->snapshot = f.values;
  cache->hat = std::move(hat);
  f.spectrum = std::move(cache);
}

ScalarField constant_field(const TorusGeometry& g, Complex value) {
  return {g, Eigen::ArrayXcd::Constant(g.total_points(), value)};
}

ScalarField sample_field(const TorusGeometry& g,
                         const std::function<Complex(const std::vector<double>&)>& fn) {
  Eigen::ArrayXcd v(g.total_points());
  for (std::int64_t i = 0; i < g.total_points(); ++i) v[i] = fn(g.coords(i));
  return {g, std::move(v)};
}

Complex field_mean(const ScalarField& f) { return f.values.mean(); }

double max_abs(const ScalarField& f) {
  return f.values.size() ? f.values.abs().maxCoeff() : 0.0;
}

double imag_defect(const ScalarField& f) {
  double scale = max_abs(f);
  if (scale == 0.0) return 0.0;
  return f.values.imag().abs().maxCoeff() / scale;
}

bool is_real(const ScalarField& f, double rel_tol) {
  return imag_defect(f) <= rel_tol;
}

Eigen::ArrayXd real_part_checked(const ScalarField& f, double rel_tol) {
  if (!is_real(f, rel_tol))
    throw numeric_error("field expected real has imaginary defect " +
                        std::to_string(imag_defect(f)));
  return f.values.real();
}

ScalarField conj(const ScalarField& f) { return {f.geom, f.values.conjugate()}; }

void require_same_geometry(const TorusGeometry& a, const TorusGeometry& b) {
  if (!(a == b)) throw usage_error("fields live on different grids");
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_geometry(a.geom, b.geom);
  return {a.geom, a.values + b.values};
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_geometry(a.geom, b.geom);
  return {a.geom, a.values - b.values};
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same_geometry(a.geom, b.geom);
  return {a.geom, a.values * b.values};
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  require_same_geometry(a.geom, b.geom);
  return {a.geom, a.values / b.values};
}

ScalarField operator*(Complex s, const ScalarField& a) {
  ScalarField r{a.geom, s * a.values};
  // scaling commutes with the transform, so the memo survives
  if (const Eigen::ArrayXcd* hat = fetch_spectrum(a))
    attach_spectrum(r, Eigen::ArrayXcd(s * *hat));
  return r;
}

ScalarField operator+(const ScalarField& a, Complex s) {
  return {a.geom, a.values + s};
}

ScalarField operator-(const ScalarField& a, Complex s) {
  return {a.geom, a.values - s};
}

ScalarField log_field(const ScalarField& a) { return {a.geom, a.values.log()}; }

ScalarField exp_field(const ScalarField& a) { return {a.geom, a.values.exp()}; }

}  // namespace ftcy
