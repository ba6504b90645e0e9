#include "ftcy/form_algebra.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <sstream>

#include "ftcy/errors.hpp"
#include "ftcy/spectral.hpp"
#include "ftcy/wedge.hpp"

namespace ftcy {

PsiField power_map(const MetricField& omega) {
  const HermitianField& g = omega.g;
  HermitianField psi(g.geom, g.n);
  for (std::int64_t idx = 0; idx < g.geom.total_points(); ++idx) {
    Eigen::MatrixXcd m = g.at(idx);
    Eigen::MatrixXcd t = m.determinant() * m.inverse().transpose();
    psi.set(idx, t);
  }
  PsiField out;
  out.m = std::move(psi);
  out.cert = check_positive_definite(out.m);
  out.positive = out.cert.positive;
  return out;
}

MetricField root_extract(const HermitianField& psi, double rel_tol) {
  PositivityReport rep = check_positive_definite(psi, rel_tol);
  if (!rep.positive) {
    std::string at;
    for (int c : rep.failure_index) at += std::to_string(c) + " ";
    throw numeric_error(
        "root_extract: coefficient matrix leaves the positive cone "
        "(first failure at grid [" + at + "])");
  }
  const int n = psi.n;
  HermitianField g(psi.geom, n);
  for (std::int64_t idx = 0; idx < psi.geom.total_points(); ++idx) {
    Eigen::MatrixXcd m = psi.at(idx);
    double det = m.determinant().real();
    double root = std::pow(det, 1.0 / (n - 1));
    g.set(idx, root * m.inverse().transpose());
  }
  return make_metric(std::move(g), rel_tol);
}

MetricField root_extract(const PsiField& psi, double rel_tol) {
  return root_extract(psi.m, rel_tol);
}

namespace {

// ddbar applied termwise in one pass, so that a repeated direction (a == b)
// uses the genuine second-derivative symbol rather than two Nyquist-zeroed
// first-order passes.  Keeps the forward Laplacian and the ddbar coefficients
// grid-consistent.
SparseForm ddbar_pass(const SparseForm& a) {
  SparseForm r(a.geom, a.n);
  for (const auto& [keys, coeff] : a.terms)
    for (int i = 1; i <= a.n; ++i) {
      if (std::find(keys.begin(), keys.end(), 2 * i - 1) != keys.end()) continue;
      for (int j = 1; j <= a.n; ++j) {
        if (std::find(keys.begin(), keys.end(), 2 * j) != keys.end()) continue;
        ScalarField h = wirtinger_hessian(coeff, i, j);
        std::vector<int> nk;
        nk.reserve(keys.size() + 2);
        nk.push_back(2 * i - 1);
        nk.push_back(2 * j);
        nk.insert(nk.end(), keys.begin(), keys.end());
        r.add_term(std::move(nk), std::move(h));
      }
    }
  return r;
}

}  // namespace

HermitianField ddbar_to_hermitian(const FormN2& phi, double reality_tol) {
  double rd = reality_defect(phi);
  if (rd > reality_tol)
    throw numeric_error("ddbar_to_hermitian: form is not real (defect " +
                        std::to_string(rd) + ")");
  SparseForm ddb = scale(ddbar_pass(expand(phi)), Complex(0.0, 0.5));
  HermitianField F = extract_psi(ddb);
  double hd = hermiticity_defect(F);
  if (hd > 1e-10)
    throw numeric_error("ddbar_to_hermitian: result not hermitian (defect " +
                        std::to_string(hd) + ")");
  return hermitize(F);
}

PsiField perturb(const PsiField& psi0, const HermitianField& F, double rel_tol) {
  PsiField out;
  out.m = psi0.m + F;
  out.cert = check_positive_definite(out.m, rel_tol);
  out.positive = out.cert.positive;
  return out;
}

ScalarField omega_norm_sq(const MetricField& omega, const HolomorphicVolume& Omega) {
  if (Omega.scale == Complex(0.0, 0.0))
    throw usage_error("holomorphic volume form must not vanish");
  ScalarField det = det_field(omega.g);
  double h2 = std::norm(Omega.scale);
  Eigen::ArrayXd v = h2 / det.values.real();
  return {det.geom, v.cast<Complex>()};
}

HermitianField ricci_hermitian(const MetricField& omega) {
  Eigen::ArrayXd det = det_field(omega.g).values.real();
  ScalarField logdet{omega.g.geom, det.log().cast<Complex>()};
  const int n = omega.g.n;
  HermitianField ric(omega.g.geom, n);
  for (int k = 1; k <= n; ++k)
    for (int l = 1; l <= n; ++l)
      ric.plane(k - 1, l - 1) = -wirtinger_hessian(logdet, k, l).values;
  return hermitize(ric);
}

Eigen::MatrixXcd normalize_to_identity(const Eigen::MatrixXcd& psi, double tol) {
  Eigen::LLT<Eigen::MatrixXcd> llt(psi);
  if (llt.info() != Eigen::Success)
    throw numeric_error("normalize_to_identity: matrix is not positive definite");
  Eigen::MatrixXcd L = llt.matrixL();
  Eigen::MatrixXcd A = L.inverse();
  double defect = (A * psi * A.adjoint() - Eigen::MatrixXcd::Identity(psi.rows(), psi.cols()))
                      .cwiseAbs()
                      .maxCoeff();
  if (defect > tol)
    throw numeric_error("normalize_to_identity: congruence defect " + std::to_string(defect));
  return A;
}

AmgmReport amgm_report(const HermitianField& B, double c, double tol) {
  const int n = B.n;
  Eigen::MatrixXcd means = entry_means(B);
  double mean_defect = means.cwiseAbs().maxCoeff();
  double scale = std::max(field_max_abs(B), 1.0);
  if (mean_defect > 1e-10 * scale)
    throw numeric_error("amgm_report: entries of B are not mean-zero (defect " +
                        std::to_string(mean_defect) + ")");

  HermitianField IB = constant_matrix_field(B.geom, Eigen::MatrixXcd::Identity(n, n)) + B;
  PositivityReport pos = check_positive_definite(IB);
  if (!pos.positive)
    throw numeric_error("amgm_report: I + B is not positive definite pointwise");

  AmgmReport rep;
  rep.sup_b = field_max_abs(B);
  Eigen::ArrayXd gap(B.geom.total_points());
  double det_defect = 0.0;
  for (std::int64_t idx = 0; idx < B.geom.total_points(); ++idx) {
    Eigen::MatrixXcd m = IB.at(idx);
    double tr = m.trace().real();
    double det = m.determinant().real();
    gap[idx] = tr / n - std::pow(det, 1.0 / n);
    det_defect = std::max(det_defect, std::abs(det - c));
  }
  rep.max_pointwise_gap = gap.maxCoeff();
  rep.gap_mean = gap.mean();
  rep.gap_integral = rep.gap_mean * torus_volume(B.geom);
  rep.det_claim_defect = det_defect;

  if (c < 1.0)
    rep.verdict = "hypothesis-violated";
  else if (rep.max_pointwise_gap < tol && rep.gap_mean < tol)
    rep.verdict = "rigid";
  else
    rep.verdict = "contradiction";
  return rep;
}

std::string to_kv_text(const AmgmReport& rep, const std::string& prefix) {
  std::ostringstream os;
  os.precision(17);
  os << prefix << ".max_pointwise_gap = " << rep.max_pointwise_gap << "\n";
  os << prefix << ".gap_integral = " << rep.gap_integral << "\n";
  os << prefix << ".gap_mean = " << rep.gap_mean << "\n";
  os << prefix << ".det_claim_defect = " << rep.det_claim_defect << "\n";
  os << prefix << ".sup_b = " << rep.sup_b << "\n";
  os << prefix << ".verdict = " << rep.verdict << "\n";
  return os.str();
}

std::string to_kv_text(const Eigen::MatrixXcd& m, const std::string& name) {
  std::ostringstream os;
  os.precision(17);
  os << name << ".rows = " << m.rows() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << name << "." << i + 1 << "." << j + 1 << " = " << m(i, j).real()
         << " " << m(i, j).imag() << "\n";
  return os.str();
}

}  // namespace ftcy
