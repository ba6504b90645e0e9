#include "ftcy/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "ftcy/errors.hpp"

namespace ftcy {

TorusGeometry TorusGeometry::make(int n, std::vector<int> active_axes,
                                  std::vector<int> grid_shape) {
  if (n < 3) throw usage_error("complex dimension must be >= 3");
  if (active_axes.empty()) throw usage_error("need at least one active axis");
  if (active_axes.size() != grid_shape.size())
    throw usage_error("one grid size per active axis required");
  for (std::size_t d = 0; d < active_axes.size(); ++d) {
    int a = active_axes[d];
    if (a < 1 || a > 2 * n) throw usage_error("active axis out of [1, 2n]");
    if (d > 0 && active_axes[d - 1] >= a)
      throw usage_error("active axes must be strictly increasing");
    int N = grid_shape[d];
    if (N < 8 || N % 2 != 0) throw usage_error("grid sizes must be even and >= 8");
  }
  TorusGeometry g;
  g.n = n;
  g.active_axes = std::move(active_axes);
  g.grid_shape = std::move(grid_shape);
  return g;
}

std::int64_t TorusGeometry::total_points() const {
  std::int64_t p = 1;
  for (int N : grid_shape) p *= N;
  return p;
}

int TorusGeometry::dim_of_axis(int axis) const {
  auto it = std::find(active_axes.begin(), active_axes.end(), axis);
  if (it == active_axes.end()) return -1;
  return static_cast<int>(it - active_axes.begin());
}

std::vector<std::int64_t> TorusGeometry::strides() const {
  std::vector<std::int64_t> s(grid_shape.size(), 1);
  for (int d = static_cast<int>(grid_shape.size()) - 2; d >= 0; --d)
    s[d] = s[d + 1] * grid_shape[d + 1];
  return s;
}

std::vector<int> TorusGeometry::unravel(std::int64_t index) const {
  std::vector<int> idx(grid_shape.size());
  for (int d = static_cast<int>(grid_shape.size()) - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(index % grid_shape[d]);
    index /= grid_shape[d];
  }
  return idx;
}

std::vector<double> TorusGeometry::coords(std::int64_t index) const {
  std::vector<double> x(2 * n, 0.0);
  auto idx = unravel(index);
  for (int d = 0; d < dims(); ++d)
    x[active_axes[d] - 1] = 2.0 * M_PI * idx[d] / grid_shape[d];
  return x;
}

double torus_volume(const TorusGeometry& g) {
  return std::pow(2.0 * M_PI, 2 * g.n);
}

}  // namespace ftcy
