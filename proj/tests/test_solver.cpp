#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ftcy/construction.hpp"
#include "ftcy/errors.hpp"
#include "ftcy/reference.hpp"
#include "ftcy/solver.hpp"
#include "ftcy/spectral.hpp"
#include "ftcy/wedge.hpp"

using namespace ftcy;

namespace {

TorusGeometry geom2d(int n = 3, int N = 32) {
  return TorusGeometry::make(n, {1, 3}, {N, N});
}

ScalarField manufactured_profile(const TorusGeometry& g, double amp) {
  return sample_field(g, [amp](const std::vector<double>& x) {
    return Complex(amp * std::sin(x[0]) * std::sin(x[2]), 0.0);
  });
}

}  // namespace

TEST_CASE("theta tensor reproduces the closed form for the standard eta") {
  for (int n : {3, 4}) {
    auto g = TorusGeometry::make(n, {1}, {8});
    Background bg = make_background(g);
    std::mt19937_64 rng(71);
    HermitianField gm =
        constant_matrix_field(g, ref::random_spd_matrix(n, rng)) +
        ref::random_hermitian_field(g, n, 2, 0.05, rng);
    AnsatzState st = make_ansatz(constant_field(g, 0.0), bg);
    // closed form: Theta = ((tr g) I - g^T) / (n - 1)
    HermitianField theta_direct(g, n);
    ScalarField tr = trace_field(st.omega.g);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        theta_direct.plane(p, q) = -st.omega.g.plane(q, p);
        if (p == q) theta_direct.plane(p, q) += tr.values;
        theta_direct.plane(p, q) /= (n - 1);
      }
    CHECK(field_max_abs(st.theta - theta_direct) < 1e-13);

    // and against the wedge engine on a non-trivial metric
    MetricField m = make_metric(gm);
    SparseForm lhs = wedge(wedge_power(oneone_form(g, bg.eta), n - 2),
                           oneone_form(m.g));
    HermitianField theta_engine = extract_psi(lhs);
    HermitianField theta_formula(g, n);
    ScalarField trm = trace_field(m.g);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        theta_formula.plane(p, q) = -m.g.plane(q, p);
        if (p == q) theta_formula.plane(p, q) += trm.values;
        theta_formula.plane(p, q) /= (n - 1);
      }
    CHECK(field_max_abs(theta_engine - theta_formula) < 1e-12);
  }
}

TEST_CASE("ansatz ddbar coefficients match the Laplacian/Hessian structure") {
  auto g = geom2d();
  Background bg = make_background(g);
  std::mt19937_64 rng(73);
  ScalarField u = ref::random_band_limited(g, 3, 0.3, true, rng);
  FormN2 psi = ansatz_form(u, bg);
  HermitianField F = ddbar_to_hermitian(psi);
  ScalarField lap = flat_laplacian(u);
  const int n = 3;
  for (int p = 1; p <= n; ++p)
    for (int q = 1; q <= n; ++q) {
      ScalarField expect = Complex(-1.0 / (n - 1), 0.0) * wirtinger_hessian(u, q, p);
      if (p == q) expect = expect + Complex(1.0 / (n - 1), 0.0) * lap;
      CHECK(max_abs({g, F.plane(p - 1, q - 1) - expect.values}) < 1e-11);
    }
}

TEST_CASE("m_map basics") {
  auto g = geom2d();
  Background bg = make_background(g);

  AnsatzState zero = make_ansatz(constant_field(g, 0.0), bg);
  CHECK(max_abs(m_map(zero, bg)) < 1e-13);

  // gauge invariance: adding a constant to u changes nothing
  std::mt19937_64 rng(79);
  ScalarField u = ref::random_band_limited(g, 2, 0.05, true, rng);
  AnsatzState a = make_ansatz(u, bg);
  AnsatzState b = make_ansatz(u + Complex(0.37, 0.0), bg);
  CHECK(max_abs(m_map(a, bg) - m_map(b, bg)) < 1e-12);

  // the image lands on the compatibility hypersurface
  ScalarField M = m_map(a, bg);
  CHECK(compatibility_defect(M, bg) < 1e-12);

  // cone exit reports a numeric error
  CHECK_THROWS_AS(make_ansatz(manufactured_profile(g, 50.0), bg), numeric_error);
}

TEST_CASE("m_map of the explicit construction vanishes") {
  ConstructionParams params;
  params.delta = 0.6;
  params.n = 3;
  params.grid = 64;
  ConstructionResult res = construct(params);
  Background bg = make_background(res.u.geom);
  ScalarField M = m_map(res.phi, bg);
  CHECK(max_abs(M) < 1e-11);
}

TEST_CASE("linearize_G: zero and constant directions") {
  auto g = geom2d();
  Background bg = make_background(g);
  std::mt19937_64 rng(83);
  AnsatzState base = make_ansatz(ref::random_band_limited(g, 2, 0.04, true, rng), bg);

  FormN2 zero_dir(g, 3);
  CHECK(max_abs(linearize_G(zero_dir, base, bg)) == 0.0);

  FormN2 const_dir(g, 3);
  const_dir.add(mask_of({2}), mask_of({2}), constant_field(g, 1.3));
  CHECK(max_abs(linearize_G(const_dir, base, bg)) < 1e-12);
}

TEST_CASE("linearize_G finite-difference consistency") {
  auto g = geom2d();
  Background bg = make_background(g);
  std::mt19937_64 rng(89);
  ScalarField u = ref::random_band_limited(g, 2, 0.04, true, rng);
  AnsatzState base = make_ansatz(u, bg);
  auto rf = ref::random_real_form(g, 3, 2, 0.3, rng);
  ScalarField gphi = linearize_G(rf.grid, base, bg);

  auto density = [&](const FormN2& phi) {
    HermitianField F = ddbar_to_hermitian(phi);
    PsiField psi = perturb(bg.psi0, F);
    REQUIRE(psi.positive);
    Eigen::ArrayXd det_g = det_field(psi.m).values.real().pow(1.0 / 2);
    double fact = 6.0;  // 3!
    return ScalarField{g, (fact * det_g).cast<Complex>()};
  };
  double t = 1e-6;
  ScalarField fd{g, (density(base.psi + Complex(t, 0.0) * rf.grid).values -
                     density(base.psi).values) /
                        t};
  CHECK(max_abs(fd - gphi) < 1e-4 * std::max(1.0, max_abs(gphi)));
}

TEST_CASE("apply_L at the flat base is the normalized Laplacian") {
  auto g = geom2d();
  Background bg = make_background(g);
  AnsatzState base = make_ansatz(constant_field(g, 0.0), bg);

  CHECK(max_abs(apply_L(constant_field(g, 2.0), base, bg)) < 1e-13);

  std::mt19937_64 rng(97);
  ScalarField d = ref::random_band_limited(g, 3, 1.0, true, rng);
  ScalarField expect = mean_zero_project(
      Complex(1.0 / (3 - 1), 0.0) * flat_laplacian(d));
  CHECK(max_abs(apply_L(d, base, bg) - expect) < 1e-11);
}

TEST_CASE("linearization consistency: FD remainder is first order in t") {
  auto g = geom2d();
  Background bg = make_background(g);
  std::mt19937_64 rng(101);
  ScalarField u = ref::random_band_limited(g, 2, 0.05, true, rng);
  AnsatzState base = make_ansatz(u, bg);
  ScalarField M0 = m_map(base, bg);
  ScalarField d = ref::random_band_limited(g, 2, 1.0, true, rng);
  ScalarField Ld = apply_L(d, base, bg);

  std::vector<double> ts = {1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<double> rs;
  for (double t : ts) {
    AnsatzState moved = make_ansatz(u + Complex(t, 0.0) * d, bg);
    ScalarField fd{g, (m_map(moved, bg).values - M0.values) / t};
    rs.push_back(max_abs(fd - Ld));
  }
  // log-log slope near 1
  double slope = std::log(rs[0] / rs.back()) / std::log(ts[0] / ts.back());
  CHECK(slope == doctest::Approx(1.0).epsilon(0.12));
}

TEST_CASE("adjointness of A and L") {
  auto g = geom2d();
  Background bg = make_background(g);
  std::mt19937_64 rng(103);

  // flat base: the correction term vanishes and the identity is spectral
  AnsatzState flat = make_ansatz(constant_field(g, 0.0), bg);
  for (int rep = 0; rep < 3; ++rep) {
    ScalarField u = project_weighted(
        ref::random_band_limited(g, 3, 1.0, true, rng), flat.det_g);
    ScalarField v = project_weighted(
        ref::random_band_limited(g, 3, 1.0, true, rng), flat.det_g);
    double A = bilinear_A(u, v, flat, bg);
    double Lv = integrate(apply_L(u, flat, bg) * v * flat.det_g).real() * 6.0;
    CHECK(std::abs(A + Lv) < 1e-10 * std::max(1.0, std::abs(A)));
    // symmetry of A
    CHECK(std::abs(A - bilinear_A(v, u, flat, bg)) < 1e-10 * std::max(1.0, std::abs(A)));
  }

  // non-flat base: quadrature accuracy
  AnsatzState warped = make_ansatz(
      Complex(0.05, 0.0) * manufactured_profile(g, 1.0), bg);
  for (int rep = 0; rep < 5; ++rep) {
    ScalarField u = project_weighted(
        ref::random_band_limited(g, 3, 1.0, true, rng), warped.det_g);
    ScalarField v = project_weighted(
        ref::random_band_limited(g, 3, 1.0, true, rng), warped.det_g);
    double A = bilinear_A(u, v, warped, bg);
    double Lv = integrate(apply_L(u, warped, bg) * v * warped.det_g).real() * 6.0;
    double nu = std::sqrt(integrate(u * u * warped.det_g).real() * 6.0);
    double nv = std::sqrt(integrate(v * v * warped.det_g).real() * 6.0);
    CHECK(std::abs(A + Lv) < 1e-8 * nu * nv);
  }
}

TEST_CASE("solve_L: flat-base oracle and round trip") {
  auto g = geom2d();
  Background bg = make_background(g);
  AnsatzState flat = make_ansatz(constant_field(g, 0.0), bg);

  CHECK(max_abs(solve_L(constant_field(g, 0.0), flat, bg).u) == 0.0);

  std::mt19937_64 rng(107);
  ScalarField h = mean_zero_project(ref::random_band_limited(g, 3, 1.0, true, rng));
  LinearResult r = solve_L(h, flat, bg);
  // closed form at the flat base: u = (n-1) * inverse flat Laplacian
  ScalarField oracle = Complex(2.0, 0.0) * solve_flat_laplacian(h);
  oracle = project_weighted(oracle, flat.det_g);
  CHECK(max_abs(r.u - oracle) < 1e-9);
  CHECK(r.residual < 1e-10);

  // perturbed base round trip + independence from the initial guess
  AnsatzState warped = make_ansatz(
      Complex(0.05, 0.0) * manufactured_profile(g, 1.0), bg);
  ScalarField hw = project_weighted(h, warped.det_g);
  LinearResult a = solve_L(hw, warped, bg);
  CHECK(max_abs(apply_L(a.u, warped, bg) - hw) < 1e-9 * max_abs(hw));
  LinearConfig cfg;
  cfg.initial_guess = ref::random_band_limited(g, 2, 0.5, true, rng);
  LinearResult b = solve_L(hw, warped, bg, cfg);
  CHECK(max_abs(a.u - b.u) < 1e-9);

  // incompatible rhs
  CHECK_THROWS_AS(solve_L(constant_field(g, 1.0), flat, bg), numeric_error);
}

TEST_CASE("newton_solve: f = 0 converges to u = 0 immediately") {
  auto g = geom2d();
  Background bg = make_background(g);
  SourceTerm f = make_source(constant_field(g, 0.0), bg);
  NewtonResult res = newton_solve(f, bg);
  CHECK(res.iterations == 0);
  CHECK(max_abs(res.state.u) == 0.0);
}

TEST_CASE("newton_solve: manufactured solution recovery") {
  auto g = geom2d(3, 32);
  Background bg = make_background(g);
  ScalarField ustar = manufactured_profile(g, 0.05);
  AnsatzState target = make_ansatz(ustar, bg);
  SourceTerm f{m_map(target, bg)};
  CHECK(compatibility_defect(f.f, bg) < 1e-11);

  NewtonConfig cfg;
  cfg.newton_tol = 1e-12;
  cfg.continuation_steps = 1;
  NewtonResult res = newton_solve(f, bg, cfg);
  CHECK(res.residual < 1e-12);
  CHECK(max_abs(res.state.u - target.u) < 1e-9);
  CHECK(res.iterations <= 8);
}

TEST_CASE("newton_solve: uniqueness at f = 0 from random initializations") {
  auto g = geom2d(3, 16);
  Background bg = make_background(g);
  SourceTerm f = make_source(constant_field(g, 0.0), bg);
  std::mt19937_64 rng(109);
  for (int rep = 0; rep < 3; ++rep) {
    NewtonConfig cfg;
    cfg.newton_tol = 1e-12;
    cfg.continuation_steps = 1;
    cfg.initial_guess = ref::random_band_limited(g, 2, 0.05, true, rng);
    NewtonResult res = newton_solve(f, bg, cfg);
    CHECK(max_abs(res.state.u) < 1e-9);
  }
}

TEST_CASE("newton_solve: cone exit reported for oversized data") {
  auto g = geom2d(3, 16);
  Background bg = make_background(g);
  std::mt19937_64 rng(113);
  ScalarField big = ref::random_band_limited(g, 2, 50.0, true, rng);
  SourceTerm f = make_source(big, bg);
  NewtonConfig cfg;
  cfg.continuation_steps = 2;
  cfg.max_iters = 25;
  CHECK_THROWS_AS(newton_solve(f, bg, cfg), numeric_error);
}

TEST_CASE("openness witness: successful amplitudes form an interval") {
  auto g = geom2d(3, 16);
  Background bg = make_background(g);
  std::mt19937_64 rng(127);
  ScalarField dir = ref::random_band_limited(g, 1, 1.0, true, rng);

  std::vector<double> amps = {0.01, 0.05, 0.2, 1.0, 4.0, 16.0};
  std::vector<bool> ok;
  for (double a : amps) {
    SourceTerm f = make_source(Complex(a, 0.0) * dir, bg);
    NewtonConfig cfg;
    cfg.continuation_steps = 4;
    cfg.max_iters = 40;
    try {
      NewtonResult res = newton_solve(f, bg, cfg);
      ok.push_back(res.residual < cfg.newton_tol);
    } catch (const numeric_error&) {
      ok.push_back(false);
    }
  }
  CHECK(ok.front());
  // prefix property: once an amplitude fails, larger ones fail too
  bool failed = false;
  for (bool s : ok) {
    if (!s) failed = true;
    if (failed) CHECK(!s);
  }
}

TEST_CASE("kernel_margin at the flat base matches the explicit spectrum") {
  auto g = geom2d(3, 16);
  Background bg = make_background(g);
  AnsatzState flat = make_ansatz(constant_field(g, 0.0), bg);
  double margin = kernel_margin(flat, bg);
  // smallest nonzero eigenvalue of -L at u = 0: |k|^2/(4(n-1)) with |k| = 1
  CHECK(margin == doctest::Approx(1.0 / 8.0).epsilon(1e-6));

  // grid doubling stability
  auto g2 = geom2d(3, 32);
  Background bg2 = make_background(g2);
  AnsatzState flat2 = make_ansatz(constant_field(g2, 0.0), bg2);
  double margin2 = kernel_margin(flat2, bg2);
  CHECK(std::abs(margin2 - margin) < 0.05 * margin);
}

TEST_CASE("source renormalization lands on the hypersurface") {
  auto g = geom2d(3, 16);
  Background bg = make_background(g);
  std::mt19937_64 rng(131);
  ScalarField raw = ref::random_band_limited(g, 2, 0.4, true, rng) + Complex(0.2, 0.0);
  CHECK(compatibility_defect(raw, bg) > 1e-3);
  SourceTerm f = make_source(raw, bg);
  CHECK(compatibility_defect(f.f, bg) < 1e-13);
}
