#include "ftcy/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include "ftcy/errors.hpp"

namespace ftcy {

namespace {

// In-place complex FFT along one storage dimension of a row-major array.
void fft_dim(Eigen::ArrayXcd& data, const TorusGeometry& g, int dim, bool inverse) {
  static thread_local Eigen::FFT<double> fft;
  const auto strides = g.strides();
  const int N = g.grid_shape[dim];
  const std::int64_t stride = strides[dim];
  const std::int64_t lines = g.total_points() / N;

  Eigen::VectorXcd in(N), out(N);
  for (std::int64_t line = 0; line < lines; ++line) {
    // Index of the line's first element: expand `line` over all dims but `dim`.
    std::int64_t rem = line, base = 0;
    for (int d = g.dims() - 1; d >= 0; --d) {
      if (d == dim) continue;
      base += (rem % g.grid_shape[d]) * strides[d];
      rem /= g.grid_shape[d];
    }
    for (int j = 0; j < N; ++j) in[j] = data[base + j * stride];
    if (inverse)
      fft.inv(out, in);
    else
      fft.fwd(out, in);
    for (int j = 0; j < N; ++j) data[base + j * stride] = out[j];
  }
}

int wavenumber(int j, int N) { return j < N / 2 ? j : j - N; }

// First-derivative wavenumber: Nyquist zeroed.
double k1(int k, int N) { return 2 * std::abs(k) == N ? 0.0 : k; }

void check_direction(const TorusGeometry& g, int i) {
  if (i < 1 || i > g.n) throw usage_error("complex direction out of [1, n]");
}

}  // namespace

ScalarField apply_multiplier(
    const ScalarField& f,
    const std::function<Complex(const std::vector<int>&)>& fn) {
  const TorusGeometry& g = f.geom;
  Eigen::ArrayXcd hat;
  if (const Eigen::ArrayXcd* cached = fetch_spectrum(f)) {
    hat = *cached;
  } else {
    hat = f.values;
    for (int d = 0; d < g.dims(); ++d) fft_dim(hat, g, d, false);
    attach_spectrum(f, hat);
  }

  std::vector<int> k(2 * g.n, 0);
  for (std::int64_t idx = 0; idx < g.total_points(); ++idx) {
    auto mi = g.unravel(idx);
    for (int d = 0; d < g.dims(); ++d)
      k[g.active_axes[d] - 1] = wavenumber(mi[d], g.grid_shape[d]);
    hat[idx] *= fn(k);
  }
  Eigen::ArrayXcd out_hat = hat;
  for (int d = 0; d < g.dims(); ++d) fft_dim(hat, g, d, true);
  ScalarField out{g, std::move(hat)};
  attach_spectrum(out, std::move(out_hat));
  return out;
}

ScalarField axis_derivative(const ScalarField& f, int axis, int order) {
  const TorusGeometry& g = f.geom;
  if (axis < 1 || axis > 2 * g.n) throw usage_error("real axis out of [1, 2n]");
  if (!g.axis_active(axis)) return constant_field(g, 0.0);
  const int dim = g.dim_of_axis(axis);
  const int N = g.grid_shape[dim];
  if (order == 1)
    return apply_multiplier(f, [axis, N](const std::vector<int>& k) {
      return Complex(0.0, k1(k[axis - 1], N));
    });
  if (order == 2)
    return apply_multiplier(f, [axis](const std::vector<int>& k) {
      double kk = k[axis - 1];
      return Complex(-kk * kk, 0.0);
    });
  throw usage_error("derivative order must be 1 or 2");
}

ScalarField wirtinger_d(const ScalarField& f, int i) {
  check_direction(f.geom, i);
  const TorusGeometry& g = f.geom;
  const int ax = 2 * i - 1, ay = 2 * i;
  const int Nx = g.axis_active(ax) ? g.grid_shape[g.dim_of_axis(ax)] : 0;
  const int Ny = g.axis_active(ay) ? g.grid_shape[g.dim_of_axis(ay)] : 0;
  return apply_multiplier(f, [=](const std::vector<int>& k) {
    double kx = Nx ? k1(k[ax - 1], Nx) : 0.0;
    double ky = Ny ? k1(k[ay - 1], Ny) : 0.0;
    // (i kx + ky) / 2
    return Complex(ky / 2.0, kx / 2.0);
  });
}

ScalarField wirtinger_dbar(const ScalarField& f, int i) {
  check_direction(f.geom, i);
  const TorusGeometry& g = f.geom;
  const int ax = 2 * i - 1, ay = 2 * i;
  const int Nx = g.axis_active(ax) ? g.grid_shape[g.dim_of_axis(ax)] : 0;
  const int Ny = g.axis_active(ay) ? g.grid_shape[g.dim_of_axis(ay)] : 0;
  return apply_multiplier(f, [=](const std::vector<int>& k) {
    double kx = Nx ? k1(k[ax - 1], Nx) : 0.0;
    double ky = Ny ? k1(k[ay - 1], Ny) : 0.0;
    return Complex(-ky / 2.0, kx / 2.0);
  });
}

ScalarField wirtinger_hessian(const ScalarField& f, int p, int q) {
  check_direction(f.geom, p);
  check_direction(f.geom, q);
  if (p == q) return dzdzbar(f, p);
  return wirtinger_d(wirtinger_dbar(f, q), p);
}

ScalarField dzdzbar(const ScalarField& f, int i) {
  check_direction(f.geom, i);
  const int ax = 2 * i - 1, ay = 2 * i;
  return apply_multiplier(f, [=](const std::vector<int>& k) {
    double kx = k[ax - 1], ky = k[ay - 1];
    return Complex(-(kx * kx + ky * ky) / 4.0, 0.0);
  });
}

ScalarField solve_dzdzbar(const ScalarField& rhs, int i, double rel_tol) {
  check_direction(rhs.geom, i);
  const double scale = max_abs(rhs);
  if (scale == 0.0) return constant_field(rhs.geom, 0.0);
  if (std::abs(field_mean(rhs)) > rel_tol * scale)
    throw numeric_error("solve_dzdzbar: rhs is not mean-zero (compatibility)");

  const int ax = 2 * i - 1, ay = 2 * i;
  // Invert where the symbol is nonzero; kernel modes must carry no data,
  // which the round-trip residual below certifies.
  ScalarField u = apply_multiplier(rhs, [&](const std::vector<int>& k) -> Complex {
    double kx = k[ax - 1], ky = k[ay - 1];
    double sym = -(kx * kx + ky * ky) / 4.0;
    if (sym == 0.0) return 0.0;
    return 1.0 / sym;
  });
  double resid = max_abs(dzdzbar(u, i) - rhs) / scale;
  if (resid > rel_tol)
    throw numeric_error("solve_dzdzbar: rhs varies along axes outside direction " +
                        std::to_string(i) + " (residual " + std::to_string(resid) + ")");
  // already mean-zero: the kernel modes of the symbol were zeroed
  return u;
}

ScalarField flat_laplacian(const ScalarField& f) {
  return apply_multiplier(f, [&](const std::vector<int>& k) {
    double s = 0.0;
    for (double kk : k) s += kk * kk;
    return Complex(-s / 4.0, 0.0);
  });
}

ScalarField solve_flat_laplacian(const ScalarField& rhs) {
  return apply_multiplier(rhs, [&](const std::vector<int>& k) -> Complex {
    double s = 0.0;
    for (double kk : k) s += kk * kk;
    if (s == 0.0) return 0.0;
    return -4.0 / s;
  });
}

ScalarField spectral_clean(const ScalarField& f, double rel_tol) {
  const TorusGeometry& g = f.geom;
  Eigen::ArrayXcd hat;
  if (const Eigen::ArrayXcd* cached = fetch_spectrum(f)) {
    hat = *cached;
  } else {
    hat = f.values;
    for (int d = 0; d < g.dims(); ++d) fft_dim(hat, g, d, false);
  }
  double floor = hat.abs().maxCoeff() * rel_tol;
  for (std::int64_t i = 0; i < hat.size(); ++i)
    if (std::abs(hat[i]) < floor) hat[i] = 0.0;
  Eigen::ArrayXcd out_hat = hat;
  for (int d = 0; d < g.dims(); ++d) fft_dim(hat, g, d, true);
  ScalarField out{g, std::move(hat)};
  attach_spectrum(out, std::move(out_hat));
  return out;
}

Complex integrate(const ScalarField& f) {
  return field_mean(f) * torus_volume(f.geom);
}

ScalarField mean_zero_project(const ScalarField& f) {
  return {f.geom, f.values - field_mean(f)};
}

}  // namespace ftcy
