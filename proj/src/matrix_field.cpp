#include "ftcy/matrix_field.hpp"

#include <Eigen/Cholesky>

#include "ftcy/errors.hpp"

namespace ftcy {

HermitianField::HermitianField(TorusGeometry g, int nn) : geom(std::move(g)), n(nn) {
  planes.assign(static_cast<std::size_t>(n) * n,
                Eigen::ArrayXcd::Zero(geom.total_points()));
}

Eigen::MatrixXcd HermitianField::at(std::int64_t idx) const {
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = plane(i, j)[idx];
  return m;
}

void HermitianField::set(std::int64_t idx, const Eigen::MatrixXcd& m) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) plane(i, j)[idx] = m(i, j);
}

HermitianField constant_matrix_field(const TorusGeometry& g, const Eigen::MatrixXcd& m) {
  HermitianField f(g, static_cast<int>(m.rows()));
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j)
      f.plane(i, j) = Eigen::ArrayXcd::Constant(g.total_points(), m(i, j));
  return f;
}

HermitianField operator+(const HermitianField& a, const HermitianField& b) {
  require_same_geometry(a.geom, b.geom);
  if (a.n != b.n) throw usage_error("matrix dimensions differ");
  HermitianField r = a;
  for (std::size_t p = 0; p < r.planes.size(); ++p) r.planes[p] += b.planes[p];
  return r;
}

HermitianField operator-(const HermitianField& a, const HermitianField& b) {
  require_same_geometry(a.geom, b.geom);
  if (a.n != b.n) throw usage_error("matrix dimensions differ");
  HermitianField r = a;
  for (std::size_t p = 0; p < r.planes.size(); ++p) r.planes[p] -= b.planes[p];
  return r;
}

HermitianField operator*(Complex s, const HermitianField& a) {
  HermitianField r = a;
  for (auto& p : r.planes) p *= s;
  return r;
}

double field_max_abs(const HermitianField& f) {
  double m = 0.0;
  for (const auto& p : f.planes)
    if (p.size()) m = std::max(m, p.abs().maxCoeff());
  return m;
}

double hermiticity_defect(const HermitianField& f) {
  double scale = field_max_abs(f);
  if (scale == 0.0) return 0.0;
  double d = 0.0;
  for (int i = 0; i < f.n; ++i)
    for (int j = i; j < f.n; ++j)
      d = std::max(d, (f.plane(i, j) - f.plane(j, i).conjugate()).abs().maxCoeff());
  return d / scale;
}

HermitianField hermitize(const HermitianField& f) {
  HermitianField r(f.geom, f.n);
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j)
      r.plane(i, j) = 0.5 * (f.plane(i, j) + f.plane(j, i).conjugate());
  return r;
}

Eigen::MatrixXcd entry_means(const HermitianField& f) {
  Eigen::MatrixXcd m(f.n, f.n);
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j) m(i, j) = f.plane(i, j).mean();
  return m;
}

HermitianField subtract_constant(const HermitianField& f, const Eigen::MatrixXcd& m) {
  HermitianField r = f;
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j) r.plane(i, j) -= m(i, j);
  return r;
}

ScalarField det_field(const HermitianField& f) {
  Eigen::ArrayXcd v(f.geom.total_points());
  for (std::int64_t idx = 0; idx < f.geom.total_points(); ++idx)
    v[idx] = f.at(idx).determinant();
  return {f.geom, std::move(v)};
}

ScalarField trace_field(const HermitianField& f) {
  Eigen::ArrayXcd v = Eigen::ArrayXcd::Zero(f.geom.total_points());
  for (int i = 0; i < f.n; ++i) v += f.plane(i, i);
  return {f.geom, std::move(v)};
}

PositivityReport check_positive_definite(const HermitianField& f, double rel_tol) {
  PositivityReport rep;
  rep.positive = true;
  rep.min_pivot_rel = std::numeric_limits<double>::infinity();
  for (std::int64_t idx = 0; idx < f.geom.total_points(); ++idx) {
    Eigen::MatrixXcd m = f.at(idx);
    double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(m);
    double pivot = ldlt.vectorD().real().minCoeff() / scale;
    if (ldlt.info() != Eigen::Success || pivot <= rel_tol) {
      if (rep.positive) {
        rep.first_failure = idx;
        rep.failure_index = f.geom.unravel(idx);
      }
      rep.positive = false;
    }
    rep.min_pivot_rel = std::min(rep.min_pivot_rel, pivot);
  }
  return rep;
}

MetricField make_metric(HermitianField g, double rel_tol) {
  double hd = hermiticity_defect(g);
  if (hd > 1e-12)
    throw numeric_error("metric coefficients are not hermitian (defect " +
                        std::to_string(hd) + ")");
  PositivityReport rep = check_positive_definite(g, rel_tol);
  if (!rep.positive) {
    std::string at;
    for (int c : rep.failure_index) at += std::to_string(c) + " ";
    throw numeric_error("metric is not positive definite (first failure at grid [" +
                        at + "], min pivot " + std::to_string(rep.min_pivot_rel) + ")");
  }
  return {std::move(g), rep.min_pivot_rel};
}

MetricField standard_metric(const TorusGeometry& g) {
  return make_metric(constant_matrix_field(g, Eigen::MatrixXcd::Identity(g.n, g.n)));
}

}  // namespace ftcy
