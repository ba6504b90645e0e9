#include "ftcy/solver.hpp"

#include <random>

#include "ftcy/errors.hpp"
#include "ftcy/reference.hpp"
#include "ftcy/spectral.hpp"
#include "ftcy/wedge.hpp"

namespace ftcy {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::vector<Eigen::MatrixXcd> build_theta_tensor(int n, const Eigen::MatrixXcd& eta) {
  // Theta is linear in the metric entries; wedge eta^{n-2} against each unit
  // (1,1)-form once and read the coefficients off the signed basis.  The
  // wedge of constant forms has constant coefficients, so a tiny grid does.
  TorusGeometry tiny = TorusGeometry::make(n, {1}, {8});
  SparseForm eta_pow = wedge_power(oneone_form(tiny, eta), n - 2);
  std::vector<Eigen::MatrixXcd> tensor(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Eigen::MatrixXcd unit = Eigen::MatrixXcd::Zero(n, n);
      unit(a, b) = 1.0;
      HermitianField psi = extract_psi(wedge(eta_pow, oneone_form(tiny, unit)));
      tensor[a * n + b] = psi.at(0);
    }
  return tensor;
}

HermitianField theta_of_metric(const HermitianField& g,
                               const std::vector<Eigen::MatrixXcd>& tensor) {
  const int n = g.n;
  HermitianField theta(g.geom, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Eigen::MatrixXcd& t = tensor[a * n + b];
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          if (t(p, q) == Complex(0.0, 0.0)) continue;
          theta.plane(p, q) += t(p, q) * g.plane(a, b);
        }
    }
  return theta;
}

// sum_{p,q} a_{p qbar} b_{p qbar}, the trace pairing of two coefficient
// matrices (equals tr(A B^T), real for hermitian pairs).
Eigen::ArrayXcd contract(const HermitianField& a, const HermitianField& b) {
  Eigen::ArrayXcd s = Eigen::ArrayXcd::Zero(a.geom.total_points());
  for (int p = 0; p < a.n; ++p)
    for (int q = 0; q < a.n; ++q) s += a.plane(p, q) * b.plane(p, q);
  return s;
}

Eigen::ArrayXcd contract(const HermitianField& a, const std::vector<ScalarField>& left,
                         const std::vector<ScalarField>& right) {
  Eigen::ArrayXcd s = Eigen::ArrayXcd::Zero(a.geom.total_points());
  for (int p = 0; p < a.n; ++p)
    for (int q = 0; q < a.n; ++q)
      s += a.plane(p, q) * left[p].values * right[q].values;
  return s;
}

}  // namespace

Background make_background(MetricField omega0, Eigen::MatrixXcd eta,
                           HolomorphicVolume Omega) {
  Background bg;
  bg.det0 = {omega0.g.geom, det_field(omega0.g).values.real().cast<Complex>()};
  bg.psi0 = power_map(omega0);
  bg.theta_tensor = build_theta_tensor(omega0.g.n, eta);
  bg.V = factorial(omega0.g.n) * integrate(bg.det0).real();
  bg.omega0 = std::move(omega0);
  bg.eta = std::move(eta);
  bg.Omega = Omega;
  return bg;
}

Background make_background(const TorusGeometry& geom) {
  return make_background(standard_metric(geom),
                         Eigen::MatrixXcd::Identity(geom.n, geom.n));
}

double compatibility_defect(const ScalarField& f, const Background& bg) {
  double lhs = integrate(exp_field(f) * bg.det0).real();
  double rhs = integrate(bg.det0).real();
  return std::abs(lhs - rhs) / rhs;
}

SourceTerm make_source(const ScalarField& f, const Background& bg) {
  real_part_checked(f, 1e-10);
  double ratio = integrate(exp_field(f) * bg.det0).real() / integrate(bg.det0).real();
  SourceTerm s{{f.geom, f.values - std::log(ratio)}};
  return s;
}

double weighted_mean(const ScalarField& f, const ScalarField& w) {
  return (integrate(f * w) / integrate(w)).real();
}

ScalarField project_weighted(const ScalarField& f, const ScalarField& w) {
  return f - Complex(weighted_mean(f, w), 0.0);
}

FormN2 ansatz_form(const ScalarField& u, const Background& bg) {
  const int n = u.geom.n;
  // eta^{n-2} has coefficient (n-2)! against every diagonal (n-2)-subset
  // monomial of the standard metric; a general constant eta scales each
  // subset by the determinant of its complementary block... computed here
  // through the wedge engine to stay convention-safe.
  FormN2 psi(u.geom, n);
  if (bg.eta.isIdentity(1e-14)) {
    for (std::uint32_t P : subsets_of_size(n, n - 2))
      psi.add(P, P, Complex(1.0 / (n - 1), 0.0) * u);
    return psi;
  }
  // Constant eta: expand eta^{n-2} once on a tiny grid and transfer the
  // coefficients.
  TorusGeometry tiny = TorusGeometry::make(n, {1}, {8});
  SparseForm pow = wedge_power(oneone_form(tiny, bg.eta), n - 2);
  const Complex norm =
      factorial(n - 1) * std::pow(Complex(0.0, 0.5), n - 2) *
      static_cast<double>(((n - 2) * (n - 3) / 2) % 2 == 0 ? 1 : -1);
  for (const auto& [keys, coeff] : pow.terms) {
    std::uint32_t P = 0, Q = 0;
    for (int k : keys) {
      if (k % 2 == 1)
        P |= 1u << ((k + 1) / 2 - 1);
      else
        Q |= 1u << (k / 2 - 1);
    }
    std::vector<int> sep;
    for (int p : indices_of(P)) sep.push_back(2 * p - 1);
    for (int q : indices_of(Q)) sep.push_back(2 * q);
    int parity = ref::inversion_sign(sep);
    Complex c = coeff.values[0] * static_cast<double>(parity) / norm;
    psi.add(P, Q, c * u);
  }
  return psi;
}

AnsatzState make_ansatz(const ScalarField& u, const Background& bg) {
  if (imag_defect(u) > 1e-8)
    throw numeric_error("ansatz profile must be real");
  // strip imaginary dust so the relative reality checks downstream stay
  // meaningful when u is small
  ScalarField ur{u.geom, u.values.real().cast<Complex>()};
  AnsatzState st;
  st.psi = ansatz_form(ur, bg);
  st.F = ddbar_to_hermitian(st.psi);
  st.Psi = perturb(bg.psi0, st.F);
  if (!st.Psi.positive) {
    std::string at;
    for (int c : st.Psi.cert.failure_index) at += std::to_string(c) + " ";
    throw numeric_error("ansatz leaves the positive cone (first failure at grid [" +
                        at + "])");
  }
  st.omega = root_extract(st.Psi);
  st.det_g = {u.geom, det_field(st.omega.g).values.real().cast<Complex>()};
  st.Vphi = factorial(u.geom.n) * integrate(st.det_g).real();
  st.theta = theta_of_metric(st.omega.g, bg.theta_tensor);
  st.u = project_weighted(ur, st.det_g);
  return st;
}

ScalarField m_map(const FormN2& phi, const Background& bg) {
  HermitianField F = ddbar_to_hermitian(phi);
  PsiField psi = perturb(bg.psi0, F);
  if (!psi.positive) throw numeric_error("m_map: form leaves the positive cone");
  const int n = phi.geom.n;
  Eigen::ArrayXd det_psi = det_field(psi.m).values.real();
  Eigen::ArrayXd det_g = det_psi.pow(1.0 / (n - 1));
  Eigen::ArrayXd det0 = bg.det0.values.real();
  double vphi = det_g.mean() * torus_volume(phi.geom) * factorial(n);
  Eigen::ArrayXd m = (det_g / det0).log() - std::log(vphi / bg.V);
  return {phi.geom, m.cast<Complex>()};
}

ScalarField m_map(const AnsatzState& state, const Background& bg) {
  Eigen::ArrayXd m = (state.det_g.values.real() / bg.det0.values.real()).log() -
                     std::log(state.Vphi / bg.V);
  return {state.u.geom, m.cast<Complex>()};
}

ScalarField linearize_G(const FormN2& psi_dir, const AnsatzState& at, const Background& bg) {
  (void)bg;
  HermitianField Fdir = ddbar_to_hermitian(psi_dir);
  const int n = psi_dir.geom.n;
  Eigen::ArrayXcd s = contract(Fdir, at.omega.g);
  double c = static_cast<double>(n) / (n - 1) * factorial(n - 1);
  return {psi_dir.geom, c * s};
}

ScalarField apply_L(const ScalarField& dir, const AnsatzState& at, const Background& bg) {
  (void)bg;
  // Complex-linear by construction, so Krylov iterates may pass through;
  // real directions give real output up to rounding.
  const int n = dir.geom.n;
  Eigen::ArrayXcd s = Eigen::ArrayXcd::Zero(dir.geom.total_points());
  for (int p = 1; p <= n; ++p)
    for (int q = 1; q <= n; ++q)
      s += wirtinger_hessian(dir, p, q).values * at.theta.plane(p - 1, q - 1);
  Eigen::ArrayXd detg = at.det_g.values.real();
  ScalarField num{dir.geom, s};
  Complex mean_term = integrate(num) / ((n - 1) * integrate(at.det_g).real());
  Eigen::ArrayXcd out = (s / detg.cast<Complex>()) / (n - 1) - mean_term;
  return {dir.geom, std::move(out)};
}

double bilinear_A(const ScalarField& u, const ScalarField& v, const AnsatzState& at,
                  const Background& bg) {
  (void)bg;
  const int n = u.geom.n;
  std::vector<ScalarField> du, dv, dubar, dvbar;
  for (int p = 1; p <= n; ++p) {
    du.push_back(wirtinger_d(u, p));
    dv.push_back(wirtinger_d(v, p));
    dubar.push_back(wirtinger_dbar(u, p));
    dvbar.push_back(wirtinger_dbar(v, p));
  }
  Eigen::ArrayXcd sym = contract(at.theta, du, dvbar) + contract(at.theta, dv, dubar);

  // Correction terms carry dbar of the Theta coefficients themselves.
  Eigen::ArrayXcd corr = Eigen::ArrayXcd::Zero(u.geom.total_points());
  for (int p = 1; p <= n; ++p)
    for (int q = 1; q <= n; ++q) {
      ScalarField dtheta =
          wirtinger_dbar({u.geom, at.theta.plane(p - 1, q - 1)}, q);
      corr += du[p - 1].values * dtheta.values;
    }
  Eigen::ArrayXcd total = sym + v.values * (corr + corr.conjugate());
  double c = factorial(n) / (2.0 * (n - 1));
  return c * (integrate({u.geom, total})).real();
}

LinearResult solve_L(const ScalarField& h, const AnsatzState& at, const Background& bg,
                     const LinearConfig& cfg) {
  const ScalarField& w = at.det_g;
  const double hsup = max_abs(h);
  if (hsup == 0.0) return {constant_field(h.geom, 0.0), 0, 0.0, {}};
  if (!is_real(h, 1e-8))
    throw numeric_error("solve_L: rhs must be real");
  if (std::abs(weighted_mean(h, w)) > 1e-8 * hsup)
    throw numeric_error("solve_L: rhs is not mean-zero against omega_phi^n");

  const int n = h.geom.n;
  auto precond = [&](const ScalarField& r) {
    ScalarField z = solve_flat_laplacian(mean_zero_project(r));
    return project_weighted(Complex(n - 1, 0) * z, w);
  };
  auto op = [&](const ScalarField& x) { return precond(apply_L(x, at, bg)); };

  ScalarField x = cfg.initial_guess ? project_weighted(*cfg.initial_guess, w)
                                    : constant_field(h.geom, 0.0);
  ScalarField b = precond(project_weighted(h, w));

  LinearResult res;
  // Full GMRES with one refinement pass when the true residual lags.
  for (int pass = 0; pass < 3; ++pass) {
    ScalarField r0 = b - op(x);
    double beta = std::sqrt((r0.values.abs2()).sum());
    double bnorm = std::sqrt((b.values.abs2()).sum());
    if (bnorm == 0.0) bnorm = 1.0;
    if (beta / bnorm > 1e-16) {
      int m = cfg.max_iters;
      std::vector<Eigen::ArrayXcd> V;
      V.push_back(r0.values / beta);
      Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
      Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m + 1);
      g[0] = beta;
      std::vector<Complex> cs(m), sn(m);
      int k = 0;
      for (; k < m; ++k) {
        ScalarField av = op({h.geom, V[k]});
        Eigen::ArrayXcd wv = av.values;
        for (int i = 0; i <= k; ++i) {
          Complex hik = (V[i].conjugate() * wv).sum();
          H(i, k) = hik;
          wv -= hik * V[i];
        }
        double hn = std::sqrt(wv.abs2().sum());
        H(k + 1, k) = hn;
        // Givens rotations to maintain the QR of H.
        for (int i = 0; i < k; ++i) {
          Complex t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
          H(i + 1, k) = -std::conj(sn[i]) * H(i, k) + std::conj(cs[i]) * H(i + 1, k);
          H(i, k) = t;
        }
        double denom = std::sqrt(std::norm(H(k, k)) + std::norm(H(k + 1, k)));
        if (denom == 0.0) break;  // zero column: drop it and solve what we have
        cs[k] = std::conj(H(k, k)) / denom;
        sn[k] = std::conj(H(k + 1, k)) / denom;
        H(k, k) = cs[k] * H(k, k) + sn[k] * H(k + 1, k);
        H(k + 1, k) = 0.0;
        Complex t = cs[k] * g[k];
        g[k + 1] = -std::conj(sn[k]) * g[k];
        g[k] = t;
        res.history.push_back(std::abs(g[k + 1]) / bnorm);
        if (hn == 0.0 || std::abs(g[k + 1]) / bnorm < cfg.rel_tol * 1e-2) {
          ++k;
          break;
        }
        V.push_back(wv / hn);
      }
      // Back substitution.
      Eigen::VectorXcd y = Eigen::VectorXcd::Zero(k);
      for (int i = k - 1; i >= 0; --i) {
        Complex s = g[i];
        for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
        y[i] = s / H(i, i);
      }
      Eigen::ArrayXcd xv = x.values;
      for (int i = 0; i < k; ++i) xv += y[i] * V[i];
      x = {h.geom, xv};
      res.iterations += k;
    }
    // the operator is real and h is real: imaginary content is Krylov noise
    x.values = x.values.real().cast<Complex>();
    x = project_weighted(x, w);
    res.residual = max_abs(apply_L(x, at, bg) - h) / hsup;
    if (res.residual <= cfg.rel_tol) break;
  }
  if (res.residual > cfg.rel_tol)
    throw numeric_error("solve_L: Krylov stagnation, relative residual " +
                        std::to_string(res.residual) + " after " +
                        std::to_string(res.iterations) + " iterations");
  res.u = x;
  return res;
}

NewtonResult newton_solve(const SourceTerm& f, const Background& bg,
                          const NewtonConfig& cfg) {
  ScalarField u = cfg.initial_guess ? *cfg.initial_guess
                                    : constant_field(f.f.geom, 0.0);
  NewtonResult res;
  res.state = make_ansatz(u, bg);
  u = res.state.u;

  auto renorm = [&](double t) {
    ScalarField tf{f.f.geom, t * f.f.values};
    return make_source(tf, bg).f;
  };

  int total_iters = 0;

  // One damped Newton stage toward the target f_t.  Returns false on a cone
  // exit or stalled damping, leaving u and the state at the last good point.
  auto run_stage = [&](double t, bool record_final) -> bool {
    ScalarField ft = renorm(t);
    double resid = max_abs(m_map(res.state, bg) - ft);
    if (record_final) {
      res.final_stage_residuals.clear();
      res.final_stage_residuals.push_back(resid);
    }
    res.history.push_back({t, total_iters, resid, 1.0});
    while (resid > cfg.newton_tol) {
      if (total_iters >= cfg.max_iters)
        throw numeric_error("newton_solve: no convergence within " +
                            std::to_string(cfg.max_iters) + " iterations (residual " +
                            std::to_string(resid) + ")");
      ScalarField r = m_map(res.state, bg) - ft;
      ScalarField rhs = project_weighted(Complex(-1.0, 0.0) * r, res.state.det_g);
      LinearConfig lc;
      lc.rel_tol = cfg.lin_rel_tol;
      lc.max_iters = cfg.lin_max_iters;
      ScalarField step = solve_L(rhs, res.state, bg, lc).u;

      double lambda = 1.0;
      bool accepted = false;
      while (lambda >= std::pow(2.0, -20)) {
        try {
          AnsatzState trial = make_ansatz(u + Complex(lambda, 0.0) * step, bg);
          double trial_resid = max_abs(m_map(trial, bg) - ft);
          if (trial_resid < resid || trial_resid < cfg.newton_tol) {
            u = trial.u;
            res.state = std::move(trial);
            resid = trial_resid;
            accepted = true;
            break;
          }
        } catch (const numeric_error&) {
          // cone exit: damp further
        }
        lambda *= 0.5;
      }
      ++total_iters;
      if (!accepted) return false;
      res.history.push_back({t, total_iters, resid, lambda});
      if (record_final) res.final_stage_residuals.push_back(resid);
    }
    return true;
  };

  // Continuation in t with adaptive halving of the increment.
  const int steps = std::max(1, cfg.continuation_steps);
  const double dt0 = 1.0 / steps;
  const double dt_min = dt0 / 16.0;
  double t = 0.0, dt = dt0;
  while (t < 1.0) {
    double t_try = std::min(1.0, t + dt);
    ScalarField u_good = u;
    AnsatzState state_good = res.state;
    if (run_stage(t_try, t_try >= 1.0)) {
      t = t_try;
      dt = std::min(dt0, 2.0 * dt);
    } else {
      u = u_good;
      res.state = std::move(state_good);
      dt *= 0.5;
      if (dt < dt_min)
        throw numeric_error(
            "newton_solve: cone exit at minimal damping and continuation step "
            "(stalled near t = " + std::to_string(t_try) + ")");
    }
  }
  res.iterations = total_iters;
  res.residual = max_abs(m_map(res.state, bg) - f.f);
  return res;
}

double kernel_margin(const AnsatzState& at, const Background& bg, int iterations,
                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarField v = ref::random_band_limited(at.u.geom, 2, 1.0, true, rng);
  v = project_weighted(v, at.det_g);
  Eigen::ArrayXd w = at.det_g.values.real();
  auto wnorm = [&](const ScalarField& f) {
    return std::sqrt((f.values.abs2() * w).sum());
  };
  double margin = 0.0;
  LinearConfig lc;
  lc.rel_tol = 1e-8;
  for (int it = 0; it < iterations; ++it) {
    double nv = wnorm(v);
    v.values /= nv;
    ScalarField next = solve_L(v, at, bg, lc).u;
    double inv = wnorm(next);
    double new_margin = 1.0 / inv;
    v = next;
    if (it > 2 && std::abs(new_margin - margin) <= 1e-8 * new_margin) {
      margin = new_margin;
      break;
    }
    margin = new_margin;
  }
  return margin;
}

}  // namespace ftcy
