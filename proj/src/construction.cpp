#include "ftcy/construction.hpp"

#include "ftcy/errors.hpp"
#include "ftcy/reference.hpp"
#include "ftcy/spectral.hpp"

namespace ftcy {

namespace {

ScalarField sin_axis(const TorusGeometry& g, int axis) {
  return sample_field(g, [axis](const std::vector<double>& x) {
    return Complex(std::sin(x[axis - 1]), 0.0);
  });
}

ScalarField build_v_dir(double k, const TorusGeometry& g, int dir) {
  if (k < 0.0 || k >= 1.0) throw usage_error("build_v: k must lie in [0, 1)");
  ScalarField s = sin_axis(g, 2 * dir - 1);
  // exactly band-limited; keep its spectrum clean of sampling roundoff
  return spectral_clean({g, -4.0 * k * s.values});
}

ScalarField build_u_dir(double delta, double k, const TorusGeometry& g, int dir) {
  if (delta <= 0.0 || delta >= 1.0) throw usage_error("build_u: delta must lie in (0, 1)");
  ScalarField s = sin_axis(g, 2 * dir - 1);
  ScalarField rhs{g, delta / (1.0 + k * s.values) - 1.0};
  double mean = std::abs(field_mean(rhs));
  if (mean > 1e-8)
    throw numeric_error("build_u: compatibility residual " + std::to_string(mean) +
                        " (k inconsistent with delta)");
  ScalarField u = solve_dzdzbar(mean_zero_project(rhs), dir);
  if (!is_real(u, 1e-10))
    throw numeric_error("build_u: solution unexpectedly not real");
  ScalarField one_plus = dzdzbar(u, dir) + Complex(1.0, 0.0);
  if (one_plus.values.real().minCoeff() <= 0.0)
    throw numeric_error("build_u: 1 + lap u is not positive");
  return u;
}

}  // namespace

namespace {

// Z evaluated by the plain trapezoid rule at exactly N nodes.
double z_at_resolution(double k, int N) {
  double s = 0.0;
  for (int j = 0; j < N; ++j) s += 1.0 / (1.0 + k * std::sin(2.0 * M_PI * j / N));
  return s / N;
}

double bisect_z(const std::function<double(double)>& z, double delta) {
  const double target = 1.0 / delta;
  double lo = 0.0, hi = 1.0 - 1e-12;
  // Z is strictly monotone on [0,1), so bisection is exact.
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (z(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  double k = 0.5 * (lo + hi);
  double err = std::abs(z(k) - target);
  if (err > 1e-11 * std::max(1.0, target))
    throw numeric_error("solve_k: bisection did not meet tolerance, |Z - 1/delta| = " +
                        std::to_string(err));
  return k;
}

}  // namespace

double z_integral(double k) {
  if (k < 0.0 || k >= 1.0) throw usage_error("z_integral: k must lie in [0, 1)");
  return ref::trapezoid_1d([k](double x) { return 1.0 / (1.0 + k * std::sin(x)); }) /
         (2.0 * M_PI);
}

double solve_k(double delta) {
  if (delta <= 0.0 || delta >= 1.0)
    throw usage_error("solve_k: delta must lie in (0, 1)");
  return bisect_z([](double k) { return z_integral(k); }, delta);
}

ScalarField build_v(double k, const TorusGeometry& g) { return build_v_dir(k, g, 1); }

ScalarField build_u(double delta, double k, const TorusGeometry& g) {
  return build_u_dir(delta, k, g, 1);
}

FormN2 assemble_phi(const ScalarField& u, const ScalarField& v, int n) {
  require_same_geometry(u.geom, v.geom);
  FormN2 phi(u.geom, n);
  std::uint32_t Pu = 0, Pv = 0;
  for (int i = 3; i <= n; ++i) Pu |= 1u << (i - 1);
  Pv = (Pu & ~(1u << 2)) | (1u << 1);  // replace index 3 by index 2
  phi.add(Pu, Pu, u);
  phi.add(Pv, Pv, v);
  return phi;
}

namespace {

ConstructionResult construct_impl(const ConstructionParams& params,
                                  const Eigen::MatrixXcd& factor_metric) {
  const int nf = static_cast<int>(factor_metric.rows());
  const int n = params.n;
  if (n - nf < 3)
    throw usage_error("torus block must keep at least 3 complex directions");
  if (params.delta <= 0.0 || params.delta >= 1.0)
    throw usage_error("delta must lie in (0, 1)");

  const int dir = nf + 1;  // first torus direction carries the profile
  TorusGeometry geom = TorusGeometry::make(n, {2 * dir - 1}, {params.grid});

  ConstructionResult res;
  res.params = params;
  // Compatibility is enforced at the working resolution: bisect the grid
  // quadrature of Z so the discrete mean of the right-hand side vanishes to
  // rounding.  The difference from the continuum root is far below the
  // quadrature tolerance for any admissible grid.
  res.k = bisect_z([&](double k) { return z_at_resolution(k, params.grid); },
                   params.delta);
  res.v = build_v_dir(res.k, geom, dir);
  res.u = build_u_dir(params.delta, res.k, geom, dir);

  double det_factor = 1.0;
  Eigen::MatrixXcd g0 = Eigen::MatrixXcd::Identity(n, n);
  if (nf > 0) {
    Eigen::LLT<Eigen::MatrixXcd> llt(factor_metric);
    if ((factor_metric - factor_metric.adjoint()).cwiseAbs().maxCoeff() >
            1e-12 * factor_metric.cwiseAbs().maxCoeff() ||
        llt.info() != Eigen::Success)
      throw usage_error("factor metric must be hermitian positive definite");
    g0.topLeftCorner(nf, nf) = factor_metric;
    det_factor = factor_metric.determinant().real();
  }

  if (nf == 0) {
    res.phi = assemble_phi(res.u, res.v, n);
  } else {
    // Factor block fully wedged in: u on the subset omitting the first two
    // torus directions, v omitting the first and third, both scaled by the
    // factor determinant.
    std::uint32_t Pu = 0, Pv = 0;
    for (int i = 1; i <= nf; ++i) {
      Pu |= 1u << (i - 1);
      Pv |= 1u << (i - 1);
    }
    for (int i = nf + 3; i <= n; ++i) Pu |= 1u << (i - 1);
    Pv |= 1u << (nf + 2 - 1);
    for (int i = nf + 4; i <= n; ++i) Pv |= 1u << (i - 1);

    res.phi = FormN2(geom, n);
    res.phi.add(Pu, Pu, Complex(det_factor, 0.0) * res.u);
    res.phi.add(Pv, Pv, Complex(det_factor, 0.0) * res.v);
  }

  MetricField bg = make_metric(constant_matrix_field(geom, g0));
  PsiField psi0 = power_map(bg);
  HermitianField F = ddbar_to_hermitian(res.phi);
  PsiField psi = perturb(psi0, F);
  if (!psi.positive)
    throw numeric_error("constructed form leaves the positive cone");
  res.omega = root_extract(psi);

  Eigen::ArrayXd det_psi = det_field(psi.m).values.real();
  Eigen::ArrayXd det_psi0 = det_field(psi0.m).values.real();
  res.residuals.det_identity =
      ((det_psi - params.delta * det_psi0) / (params.delta * det_psi0))
          .abs()
          .maxCoeff();

  HolomorphicVolume Omega;
  Eigen::ArrayXd norm_f = omega_norm_sq(res.omega, Omega).values.real().sqrt();
  double bg_norm = 1.0 / std::sqrt(det_factor);
  Eigen::ArrayXd ratio = norm_f / bg_norm;
  res.C0 = ratio.mean();
  res.residuals.c0_constancy = (ratio - res.C0).abs().maxCoeff();
  res.residuals.ricci_sup = field_max_abs(ricci_hermitian(res.omega));

  res.min_one_plus_lap_u =
      (dzdzbar(res.u, dir).values.real() + 1.0).minCoeff();
  res.min_one_plus_lap_v =
      (dzdzbar(res.v, dir).values.real() + 1.0).minCoeff();
  res.residuals.positivity_margin =
      std::min(res.min_one_plus_lap_u, res.min_one_plus_lap_v);
  return res;
}

}  // namespace

ConstructionResult construct(const ConstructionParams& params) {
  return construct_impl(params, Eigen::MatrixXcd(0, 0));
}

ConstructionResult construct_product(const ConstructionParams& params,
                                     const Eigen::MatrixXcd& factor_metric) {
  return construct_impl(params, factor_metric);
}

}  // namespace ftcy
