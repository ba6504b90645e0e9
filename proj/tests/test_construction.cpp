#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ftcy/construction.hpp"
#include "ftcy/form_algebra.hpp"
#include "ftcy/errors.hpp"
#include "ftcy/reference.hpp"
#include "ftcy/spectral.hpp"

using namespace ftcy;

TEST_CASE("z_integral anchors") {
  CHECK(z_integral(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  // the oracle value for k = 0.8 is 1/0.6 (verified numerically; the closed
  // form 1/sqrt(1-k^2) is only a cross-check, not assumed)
  CHECK(z_integral(0.8) == doctest::Approx(1.0 / 0.6).epsilon(1e-12));
  CHECK(z_integral(0.999) > 20.0);
  CHECK_THROWS_AS(z_integral(-0.1), usage_error);
  CHECK_THROWS_AS(z_integral(1.0), usage_error);

  // numerical verification of the closed form on a sweep
  for (double k : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    CHECK(z_integral(k) == doctest::Approx(1.0 / std::sqrt(1 - k * k)).epsilon(1e-12));
  }
}

TEST_CASE("z_integral is monotone") {
  double prev = 0.0;
  for (int i = 0; i < 100; ++i) {
    double z = z_integral(0.0099 * i);
    if (i > 0) CHECK(z > prev);
    prev = z;
  }
}

TEST_CASE("solve_k") {
  CHECK(solve_k(0.6) == doctest::Approx(0.8).epsilon(1e-11));
  CHECK(solve_k(0.8) == doctest::Approx(0.6).epsilon(1e-11));
  CHECK(std::abs(z_integral(solve_k(0.6)) - 1.0 / 0.6) < 1e-12);
  CHECK(solve_k(0.999) == doctest::Approx(std::sqrt(1 - 0.999 * 0.999)).epsilon(1e-9));
  // delta -> 1 pushes k -> 0
  CHECK(solve_k(0.999999) < 2e-3);
  CHECK_THROWS_AS(solve_k(0.0), usage_error);
  CHECK_THROWS_AS(solve_k(1.0), usage_error);
  CHECK_THROWS_AS(solve_k(1.5), usage_error);

  // inverse-function round trip on a sweep
  for (double d = 0.1; d < 0.95; d += 0.1) {
    double k = solve_k(d);
    CHECK(std::abs(z_integral(k) - 1.0 / d) < 1e-10 / d);
  }
}

TEST_CASE("build_v") {
  auto g = TorusGeometry::make(3, {1}, {64});
  CHECK(max_abs(build_v(0.0, g)) == 0.0);
  ScalarField v = build_v(0.8, g);
  Eigen::ArrayXd one_plus = dzdzbar(v, 1).values.real() + 1.0;
  CHECK(one_plus.minCoeff() == doctest::Approx(0.2).epsilon(1e-12));
  // forward-operator check against the finite-difference oracle
  ScalarField dv = ref::fd_axis_derivative(ref::fd_axis_derivative(v, 1), 1);
  CHECK(max_abs(dzdzbar(v, 1) - ScalarField{g, 0.25 * dv.values}) < 1e-3);
  CHECK_THROWS_AS(build_v(1.0, g), usage_error);
}

TEST_CASE("build_u") {
  auto g = TorusGeometry::make(3, {1}, {256});
  double delta = 0.6;
  double k = solve_k(delta);
  ScalarField u = build_u(delta, k, g);
  CHECK(is_real(u));
  CHECK(std::abs(field_mean(u)) < 1e-13);
  Eigen::ArrayXd one_plus = dzdzbar(u, 1).values.real() + 1.0;
  CHECK(one_plus.minCoeff() == doctest::Approx(delta / (1 + k)).epsilon(1e-10));
  // residual of the profile equation
  ScalarField sinx = sample_field(g, [](const std::vector<double>& x) {
    return Complex(std::sin(x[0]), 0.0);
  });
  ScalarField target{g, delta / (1.0 + k * sinx.values) - 1.0};
  CHECK(max_abs(dzdzbar(u, 1) - mean_zero_project(target)) < 1e-10);

  // mismatched k violates compatibility
  CHECK_THROWS_AS(build_u(0.6, 0.3, g), numeric_error);
}

TEST_CASE("construct: delta = 0.6, n = 3") {
  ConstructionParams params;
  params.delta = 0.6;
  params.n = 3;
  params.grid = 256;
  ConstructionResult res = construct(params);

  CHECK(res.k == doctest::Approx(0.8).epsilon(1e-11));
  CHECK(res.residuals.det_identity < 1e-10);
  CHECK(res.C0 == doctest::Approx(std::pow(0.6, -0.25)).epsilon(1e-12));
  CHECK(res.C0 > 1.0);
  CHECK(res.residuals.c0_constancy < 1e-10);
  CHECK(res.residuals.ricci_sup < 1e-9);
  CHECK(res.min_one_plus_lap_u == doctest::Approx(0.6 / 1.8).epsilon(1e-9));
  CHECK(res.min_one_plus_lap_v == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("construct: delta -> 1 collapses to the flat background") {
  ConstructionParams params;
  params.delta = 0.999999;
  params.n = 3;
  params.grid = 64;
  ConstructionResult res = construct(params);
  CHECK(res.k < 2e-3);
  CHECK(max_abs(res.u) < 1e-2);
  CHECK(res.C0 == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(field_max_abs(res.omega.g -
                      constant_matrix_field(res.u.geom,
                                            Eigen::MatrixXcd::Identity(3, 3))) < 1e-2);
}

TEST_CASE("construct: n = 4") {
  ConstructionParams params;
  params.delta = 0.25;
  params.n = 4;
  params.grid = 128;
  ConstructionResult res = construct(params);
  CHECK(res.residuals.det_identity < 1e-10);
  CHECK(res.C0 == doctest::Approx(std::pow(0.25, -1.0 / 6)).epsilon(1e-12));
  CHECK(res.residuals.ricci_sup < 1e-9);
}

TEST_CASE("construct: delta sweep invariants") {
  for (double delta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    ConstructionParams params;
    params.delta = delta;
    params.n = 3;
    params.grid = 128;
    ConstructionResult res = construct(params);
    CHECK(res.residuals.det_identity < 1e-10);
    CHECK(std::abs(res.C0 - std::pow(delta, -0.25)) < 1e-9);
    CHECK(res.residuals.ricci_sup < 1e-9);
    CHECK(res.min_one_plus_lap_u ==
          doctest::Approx(delta / (1 + res.k)).epsilon(1e-8));
    CHECK(res.min_one_plus_lap_v == doctest::Approx(1 - res.k).epsilon(1e-8));
  }
}

TEST_CASE("construct rejects bad parameters") {
  ConstructionParams params;
  params.delta = 1.5;
  CHECK_THROWS_AS(construct(params), usage_error);
  params.delta = 0.5;
  params.n = 2;
  CHECK_THROWS_AS(construct(params), usage_error);
}

TEST_CASE("rigidity dichotomy for the constructed perturbation") {
  ConstructionParams params;
  params.delta = 0.6;
  params.n = 3;
  params.grid = 64;
  ConstructionResult res = construct(params);
  // B = F_phi has mean-zero entries and I + B > 0, but det(I+B) = delta < 1:
  // the c >= 1 hypothesis fails.
  HermitianField F = ddbar_to_hermitian(res.phi);
  AmgmReport rep = amgm_report(F, params.delta);
  CHECK(rep.verdict == "hypothesis-violated");
  CHECK(rep.det_claim_defect < 1e-10);

  // Sampled mean-zero perturbations with det renormalized to c >= 1 always
  // leave a strictly positive integral gap unless they vanish.
  std::mt19937_64 rng(61);
  for (int s = 0; s < 10; ++s) {
    HermitianField B0 =
        ref::random_hermitian_field(res.u.geom, 3, 2, 0.05 + 0.02 * s, rng);
    B0 = subtract_constant(B0, entry_means(B0));
    HermitianField B = ref::renormalize_det_to_constant(B0, 1.0);
    AmgmReport r = amgm_report(B, 1.0);
    CHECK(r.verdict != "rigid");
    CHECK(r.gap_mean > 1e-6);
  }
}

TEST_CASE("construct_product: trivial factor reduces to construct") {
  ConstructionParams params;
  params.delta = 0.5;
  params.n = 3;
  params.grid = 64;
  ConstructionResult plain = construct(params);
  ConstructionResult prod = construct_product(params, Eigen::MatrixXcd(0, 0));
  CHECK(field_max_abs(prod.omega.g - plain.omega.g) == 0.0);
  CHECK(prod.C0 == plain.C0);
}

TEST_CASE("construct_product: n = 4 = 1 + 3") {
  ConstructionParams params;
  params.delta = 0.5;
  params.n = 4;
  params.grid = 128;
  Eigen::MatrixXcd gN(1, 1);
  gN(0, 0) = 2.0;
  ConstructionResult res = construct_product(params, gN);
  CHECK(res.residuals.det_identity < 1e-10);
  CHECK(res.C0 == doctest::Approx(std::pow(0.5, -1.0 / 6)).epsilon(1e-11));
  CHECK(res.residuals.ricci_sup < 1e-9);

  // determinant homogeneity: scaling the factor leaves delta unchanged
  ConstructionResult scaled = construct_product(params, 3.7 * gN);
  CHECK(scaled.residuals.det_identity < 1e-10);

  // a non-scalar factor
  ConstructionParams p5 = params;
  p5.n = 5;
  p5.grid = 64;
  std::mt19937_64 rng(67);
  Eigen::MatrixXcd g2 = ref::random_spd_matrix(2, rng);
  ConstructionResult res5 = construct_product(p5, g2);
  CHECK(res5.residuals.det_identity < 1e-10);

  // torus block must keep at least three directions
  Eigen::MatrixXcd g22 = ref::random_spd_matrix(2, rng);
  CHECK_THROWS_AS(construct_product(params, g22), usage_error);
}

TEST_CASE("assemble_phi edge cases") {
  auto g = TorusGeometry::make(3, {1}, {32});
  ScalarField zero = constant_field(g, 0.0);
  FormN2 phi0 = assemble_phi(zero, zero, 3);
  CHECK(field_max_abs(ddbar_to_hermitian(phi0)) == 0.0);

  // positivity of I + F is exactly the positivity of the two profiles
  double k = 0.8;
  ScalarField v = build_v(k, g);
  ScalarField u = build_u(z_integral(k) > 0 ? 1.0 / z_integral(k) : 0.5, k, g);
  FormN2 phi = assemble_phi(u, v, 3);
  PsiField psi0 = power_map(standard_metric(g));
  PsiField good = perturb(psi0, ddbar_to_hermitian(phi));
  CHECK(good.positive);

  ScalarField vbad{g, 2.0 * v.values};  // 1 + lap v dips below zero
  FormN2 phibad(g, 3);
  phibad.add(mask_of({3}), mask_of({3}), u);
  phibad.add(mask_of({2}), mask_of({2}), vbad);
  PsiField bad = perturb(psi0, ddbar_to_hermitian(phibad));
  CHECK(!bad.positive);
}
