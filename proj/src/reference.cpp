#include "ftcy/reference.hpp"

#include <map>

#include "ftcy/errors.hpp"

namespace ftcy {
namespace ref {

namespace {

Complex ipow(int k) {
  static const Complex cycle[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return cycle[((k % 4) + 4) % 4];
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

Complex ModeField::eval(const std::vector<double>& x) const {
  Complex s = 0.0;
  for (const auto& mode : modes) {
    double phase = 0.0;
    for (std::size_t a = 0; a < mode.m.size(); ++a) phase += mode.m[a] * x[a];
    s += mode.c * std::exp(Complex(0.0, phase));
  }
  return s;
}

ModeField ModeField::dz(int i) const {
  // d/dz_i exp(i m.x) = (i m_{2i-1} + m_{2i})/2 exp(i m.x)
  ModeField out{n, {}};
  for (const auto& mode : modes) {
    Complex mu = Complex(mode.m[2 * i - 1], mode.m[2 * i - 2]) * 0.5;
    if (mu != Complex(0.0, 0.0)) out.modes.push_back({mode.m, mode.c * mu});
  }
  return out;
}

ModeField ModeField::dzbar(int i) const {
  ModeField out{n, {}};
  for (const auto& mode : modes) {
    Complex mu = Complex(-mode.m[2 * i - 1], mode.m[2 * i - 2]) * 0.5;
    if (mu != Complex(0.0, 0.0)) out.modes.push_back({mode.m, mode.c * mu});
  }
  return out;
}

ModeField ModeField::conjugate() const {
  ModeField out{n, {}};
  for (const auto& mode : modes) {
    std::vector<int> m(mode.m.size());
    for (std::size_t a = 0; a < m.size(); ++a) m[a] = -mode.m[a];
    out.modes.push_back({std::move(m), std::conj(mode.c)});
  }
  return out;
}

ScalarField to_grid(const ModeField& f, const TorusGeometry& g) {
  Eigen::ArrayXcd v(g.total_points());
  for (std::int64_t idx = 0; idx < g.total_points(); ++idx) v[idx] = f.eval(g.coords(idx));
  return {g, std::move(v)};
}

int inversion_sign(const std::vector<int>& keys) {
  int inversions = 0;
  for (std::size_t i = 0; i < keys.size(); ++i)
    for (std::size_t j = i + 1; j < keys.size(); ++j) {
      if (keys[i] == keys[j]) return 0;
      if (keys[i] > keys[j]) ++inversions;
    }
  return inversions % 2 == 0 ? 1 : -1;
}

FormN2 to_grid(const ModeForm& phi, const TorusGeometry& g) {
  FormN2 out(g, phi.n);
  for (const auto& [P, Q, f] : phi.comps) out.add(P, Q, to_grid(f, g).values);
  return out;
}

Eigen::MatrixXcd ddbar_oracle_at(const ModeForm& phi, const std::vector<double>& x,
                                 const OracleMutation& mut) {
  const int n = phi.n;
  const int m = n - 2;

  // Storage convention sign: parity of the separated ascending key order of
  // the diagonal block {1..m}, counted directly.
  std::vector<int> pattern;
  for (int p = 1; p <= m; ++p) pattern.push_back(2 * p - 1);
  for (int p = 1; p <= m; ++p) pattern.push_back(2 * p);
  const int sigma = m == 0 ? 1 : inversion_sign(pattern);

  const Complex comp_norm = factorial(n - 1) * ipow(m) / std::pow(2.0, m) *
                            static_cast<double>(sigma);

  std::map<std::vector<int>, Complex> accum;
  for (const auto& [P, Q, u] : phi.comps) {
    std::vector<int> base;
    for (int p : indices_of(P)) base.push_back(2 * p - 1);
    for (int q : indices_of(Q)) base.push_back(2 * q);
    for (int a = 1; a <= n; ++a)
      for (int b = 1; b <= n; ++b) {
        Complex der = u.dz(a).dzbar(b).eval(x);
        if (der == Complex(0.0, 0.0)) continue;
        std::vector<int> keys = {2 * a - 1, 2 * b};
        keys.insert(keys.end(), base.begin(), base.end());
        int sign = inversion_sign(keys);
        if (sign == 0) continue;
        std::sort(keys.begin(), keys.end());
        // (i/2) ddbar phi: one extra factor i/2 on top of the component norm
        accum[keys] += Complex(0.0, 0.5) * comp_norm * der *
                       static_cast<double>(sign);
      }
  }

  Complex basis_norm = ipow(n - 1) / std::pow(2.0, n - 1);
  if (!mut.drop_factorial) basis_norm *= factorial(n - 1);

  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(n, n);
  for (int p = 1; p <= n; ++p)
    for (int q = 1; q <= n; ++q) {
      std::vector<int> keys;
      for (int k = 1; k <= 2 * n; ++k)
        if (k != 2 * p - 1 && k != 2 * q) keys.push_back(k);
      auto it = accum.find(keys);
      if (it == accum.end()) continue;
      double s = p <= q ? 1.0 : -1.0;
      if (mut.flip_sign) s = -s;
      F(p - 1, q - 1) = s * it->second / basis_norm;
    }
  if (mut.mean_shift != 0.0)
    F.array() += mut.mean_shift;
  return F;
}

Eigen::MatrixXcd psi_oracle(const std::vector<Eigen::MatrixXcd>& factors) {
  const int n = static_cast<int>(factors.size()) + 1;
  std::map<std::vector<int>, Complex> accum;

  // Expand the product of n-1 (1,1)-forms term by term.
  std::vector<int> ab(2 * (n - 1), 1);  // (a_1, b_1, ..., a_{n-1}, b_{n-1})
  while (true) {
    Complex coeff = 1.0;
    std::vector<int> keys;
    for (int f = 0; f < n - 1; ++f) {
      int a = ab[2 * f], b = ab[2 * f + 1];
      coeff *= factors[f](a - 1, b - 1);
      keys.push_back(2 * a - 1);
      keys.push_back(2 * b);
    }
    if (coeff != Complex(0.0, 0.0)) {
      int sign = inversion_sign(keys);
      if (sign != 0) {
        std::sort(keys.begin(), keys.end());
        accum[keys] += coeff * static_cast<double>(sign);
      }
    }
    int d = 0;
    while (d < 2 * (n - 1) && ab[d] == n) ab[d++] = 1;
    if (d == 2 * (n - 1)) break;
    ++ab[d];
  }

  // The common (i/2)^{n-1} prefactor cancels against the basis normalization.
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(n, n);
  for (int p = 1; p <= n; ++p)
    for (int q = 1; q <= n; ++q) {
      std::vector<int> keys;
      for (int k = 1; k <= 2 * n; ++k)
        if (k != 2 * p - 1 && k != 2 * q) keys.push_back(k);
      auto it = accum.find(keys);
      if (it == accum.end()) continue;
      double s = p <= q ? 1.0 : -1.0;
      psi(p - 1, q - 1) = s * it->second / factorial(n - 1);
    }
  return psi;
}

ModeField random_mode_field(const TorusGeometry& g, int max_mode, double amplitude,
                            std::mt19937_64& rng) {
  std::uniform_int_distribution<int> mode(-max_mode, max_mode);
  std::normal_distribution<double> amp(0.0, 1.0);
  ModeField f{g.n, {}};
  const int count = 6;
  for (int t = 0; t < count; ++t) {
    std::vector<int> m(2 * g.n, 0);
    for (int a : g.active_axes) m[a - 1] = mode(rng);
    f.modes.push_back({std::move(m), Complex(amp(rng), amp(rng)) * amplitude});
  }
  return f;
}

ScalarField random_band_limited(const TorusGeometry& g, int max_mode, double amplitude,
                                bool real_valued, std::mt19937_64& rng) {
  ModeField f = random_mode_field(g, max_mode, 1.0, rng);
  if (real_valued) {
    ModeField c = f.conjugate();
    f.modes.insert(f.modes.end(), c.modes.begin(), c.modes.end());
    for (auto& mode : f.modes) mode.c *= 0.5;
  }
  ScalarField out = to_grid(f, g);
  double scale = max_abs(out);
  if (scale > 0.0) out.values *= amplitude / scale;
  return out;
}

HermitianField random_hermitian_field(const TorusGeometry& g, int n, int max_mode,
                                      double amplitude, std::mt19937_64& rng) {
  HermitianField f(g, n);
  for (int i = 0; i < n; ++i) {
    f.plane(i, i) = random_band_limited(g, max_mode, amplitude, true, rng).values;
    for (int j = i + 1; j < n; ++j) {
      f.plane(i, j) = random_band_limited(g, max_mode, amplitude, false, rng).values;
      f.plane(j, i) = f.plane(i, j).conjugate();
    }
  }
  return f;
}

Eigen::MatrixXcd random_spd_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> amp(0.0, 1.0);
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(amp(rng), amp(rng));
  return a * a.adjoint() / n + 0.5 * Eigen::MatrixXcd::Identity(n, n);
}

RandomForm random_real_form(const TorusGeometry& g, int n, int max_mode,
                            double amplitude, std::mt19937_64& rng) {
  auto subsets = subsets_of_size(n, n - 2);
  std::uniform_int_distribution<std::size_t> pick(0, subsets.size() - 1);
  ModeForm phi{n, {}};
  const int pairs = 2;
  for (int t = 0; t < pairs; ++t) {
    std::uint32_t P = subsets[pick(rng)], Q = subsets[pick(rng)];
    ModeField w = random_mode_field(g, max_mode, amplitude, rng);
    if (P == Q) {
      ModeField c = w.conjugate();
      w.modes.insert(w.modes.end(), c.modes.begin(), c.modes.end());
      for (auto& mode : w.modes) mode.c *= 0.5;
      phi.comps.emplace_back(P, Q, w);
    } else {
      phi.comps.emplace_back(P, Q, w);
      phi.comps.emplace_back(Q, P, w.conjugate());
    }
  }
  return {to_grid(phi, g), phi};
}

ScalarField fd_axis_derivative(const ScalarField& f, int axis) {
  const TorusGeometry& g = f.geom;
  if (!g.axis_active(axis)) return constant_field(g, 0.0);
  const int dim = g.dim_of_axis(axis);
  const int N = g.grid_shape[dim];
  const double h = 2.0 * M_PI / N;
  const auto strides = g.strides();
  const std::int64_t stride = strides[dim];

  Eigen::ArrayXcd out(g.total_points());
  for (std::int64_t idx = 0; idx < g.total_points(); ++idx) {
    auto mi = g.unravel(idx);
    std::int64_t base = idx - static_cast<std::int64_t>(mi[dim]) * stride;
    auto at = [&](int shift) {
      int j = ((mi[dim] + shift) % N + N) % N;
      return f.values[base + j * stride];
    };
    out[idx] = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
  }
  return {g, std::move(out)};
}

HermitianField renormalize_det_to_constant(const HermitianField& B, double c) {
  const int n = B.n;
  HermitianField out(B.geom, n);
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  for (std::int64_t idx = 0; idx < B.geom.total_points(); ++idx) {
    Eigen::MatrixXcd ib = id + B.at(idx);
    double det = ib.determinant().real();
    if (det <= 0.0) throw numeric_error("renormalize_det_to_constant: I + B <= 0");
    double s = std::pow(c / det, 1.0 / n);
    out.set(idx, s * ib - id);
  }
  return subtract_constant(out, entry_means(out));
}

double trapezoid_1d(const std::function<double(double)>& fn, int initial_n,
                    double rel_tol) {
  auto eval = [&](int N) {
    double s = 0.0;
    for (int j = 0; j < N; ++j) s += fn(2.0 * M_PI * j / N);
    return s * 2.0 * M_PI / N;
  };
  int N = initial_n;
  double prev = eval(N);
  for (int it = 0; it < 16; ++it) {
    N *= 2;
    double cur = eval(N);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace ref
}  // namespace ftcy
